"""Optimal spreader sets for random-walk hitting times on graphs."""

from .cover import MatchingCover, exact_min_cover, is_vertex_cover, maximal_matching_cover
from .curvature import (
    CurvatureReport,
    TradeoffResult,
    elemental_curvature,
    gamma_max_marginal,
    rank_lower_bound,
    tradeoff,
)
from .errors import *  # noqa: F401,F403
from .graph import Graph, TransitionMatrix, is_bipartite, parse_graph, read_graph, transition_matrix
from .greedoid import (
    AxiomReport,
    GreedoidFamily,
    build_greedoid,
    check_axioms,
    check_class_g3,
    feasible_seeds,
)
from .hitting import HittingProfile, McEstimate, Objective, hitting_times, mc_hitting, spread_objective
from .optimize import (
    ExtensionTrace,
    SearchResult,
    brute_force_optimum,
    cover_seeds,
    greedy,
    greedy_extend,
    seeded_search,
)
from .ranking import (
    NearOptimalClass,
    RankContext,
    enumerate_class,
    marginal_gain,
    rank,
    rank_context,
)

__version__ = "0.1.0"
