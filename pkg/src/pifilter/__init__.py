"""Frequency-domain two-port toolkit for feedline Purcell filters."""
from importlib.resources import files

from .elements import LineSpec, LumpedLC, TwoPort, pi_filter_abcd
from .netlist import Netlist, NetlistError, load_netlist, parse_netlist
from .network import chain_abcd, response_sweep, s_params
from .purcell import PurcellCurve, protected_band, purcell_curve

__all__ = [
    "LineSpec", "LumpedLC", "TwoPort", "pi_filter_abcd",
    "Netlist", "NetlistError", "load_netlist", "parse_netlist",
    "chain_abcd", "response_sweep", "s_params",
    "PurcellCurve", "protected_band", "purcell_curve",
    "example_path", "example_names", "load_example",
]


def example_names() -> list[str]:
    """Netlists shipped with the package."""
    return sorted(p.name for p in files(__package__).joinpath("netlists").iterdir() if p.name.endswith(".nl"))


def example_path(name: str):
    if not name.endswith(".nl"):
        name += ".nl"
    path = files(__package__).joinpath("netlists", name)
    if not path.is_file():
        raise FileNotFoundError(f"no shipped netlist {name!r}; available: {', '.join(example_names())}")
    return path


def load_example(name: str) -> Netlist:
    return parse_netlist(example_path(name).read_text(encoding="utf-8"))
