"""Pass valuation from ball trajectories, nearest-neighbour expected reward
and match outcome forecasting."""

__version__ = "0.1.0"

from .events import Event, EventKind, SubKind, parse_events, read_events  # noqa: E402
from .knn_index import GridSpec, build_index, expected_reward  # noqa: E402
from .possession import enumerate_subsequences, segment_possessions  # noqa: E402
from .valuation import rate_players, value_game  # noqa: E402
from .xg import GbtModel, train_xg  # noqa: E402

__all__ = [
    "Event", "EventKind", "SubKind", "GbtModel", "GridSpec", "build_index", "enumerate_subsequences",
    "expected_reward", "parse_events", "rate_players", "read_events", "segment_possessions",
    "train_xg", "value_game", "__version__",
]
