"""Alignment metrics for comparing simulated and human survey response distributions."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    ParseError,
    QuestionRecord,
    RadiusError,
    RankVector,
    ResponseDistribution,
    Survey,
    ValidationError,
    parse_survey,
    rank_counts,
    read_survey,
    to_distribution,
)
from .kernel import (  # noqa: E402
    ConfidenceInterval,
    RngStream,
    bootstrap_proportion_cis,
    chi_square_sf,
    multinomial_sample,
    student_t_sf2,
)
from .ranking import RankingScores, TopGroup, rank_correlation, top_group, trm  # noqa: E402
from .distribution import (  # noqa: E402
    DistributionScores,
    cramers_v,
    homogeneity_test,
    jsd,
    tvd,
    wasserstein_1d,
)
from .baselines import BaselineSpec, generate_baseline  # noqa: E402
from .report import (  # noqa: E402
    PairedComparison,
    QuestionAlignment,
    RunConfig,
    SurveyReport,
    evaluate_survey,
    paired_compare,
    render_report,
)
