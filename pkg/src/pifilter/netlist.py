"""Netlist model and the line-oriented netlist text format.

A netlist is a single chain between an input and an output port. Chain items
are series elements (``tline``, ``cap``) or shunt items (``stub``, ``lc``,
``branch``). A branch is its own little chain hanging off the feedline; it may
contain named nodes (qubit sites) and ends open, shorted, or at its last node.

Numbers are plain floats in SI base units. Example::

    param eps_eff 5.95 ztl 50.48
    port in z=50.48
    port out z=50.48
    cap c=50e-15 name=cin
    tline len=13.4e-3
    branch rr
      cap c=10e-15
      tline z=69.61 len=10.88e-3
      cap c=22e-15
      node q1 cground=81e-15
    end
    tline len=5.7e-3
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Union

C0 = 299_792_458.0


class NetlistError(ValueError):
    """Malformed netlist text; ``lineno`` is 1-based (0 when not line specific)."""

    def __init__(self, message: str, lineno: int = 0):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno else message)


class ParameterPathError(KeyError):
    pass


@dataclass(frozen=True)
class Line:
    """Series transmission line."""
    z: float
    length: float
    name: str = ""


@dataclass(frozen=True)
class SeriesCap:
    c: float
    name: str = ""


@dataclass(frozen=True)
class OpenStub:
    """Open-ended stub in shunt at its chain position."""
    z: float
    length: float
    name: str = ""


@dataclass(frozen=True)
class ShuntLC:
    """Series LC to ground in shunt (lumped stand-in for an open stub)."""
    l: float
    c: float
    name: str = ""


@dataclass(frozen=True)
class Node:
    """Named junction inside a branch; ``cground`` is a shunt capacitor to ground
    and ``fq`` an optional idle frequency (Hz) of a qubit sitting there."""
    name: str
    cground: float = 0.0
    fq: Optional[float] = None


@dataclass(frozen=True)
class Branch:
    name: str
    elements: tuple = ()
    termination: str = "open"  # "open" | "short"


Element = Union[Line, SeriesCap, OpenStub, ShuntLC, Node, Branch]

# settable numeric fields per element kind, first entry is the default field
_FIELDS = {
    Line: {"len": "length", "z": "z"},
    OpenStub: {"len": "length", "z": "z"},
    SeriesCap: {"c": "c"},
    ShuntLC: {"l": "l", "c": "c"},
    Node: {"cground": "cground", "fq": "fq"},
}


@dataclass(frozen=True)
class Netlist:
    chain: tuple
    z_in: float
    z_out: float
    velocity: float
    ztl: Optional[float] = None

    def iter_elements(self) -> Iterator[tuple[Optional[Branch], Element]]:
        """Yield ``(owning_branch_or_None, element)`` in document order."""
        for item in self.chain:
            yield None, item
            if isinstance(item, Branch):
                for el in item.elements:
                    yield item, el

    def nodes(self) -> dict[str, Node]:
        return {el.name: el for _, el in self.iter_elements() if isinstance(el, Node)}

    def locate_node(self, name: str) -> tuple[int, int]:
        """``(chain index of the branch, index of the node inside it)``."""
        for i, item in enumerate(self.chain):
            if isinstance(item, Branch):
                for j, el in enumerate(item.elements):
                    if isinstance(el, Node) and el.name == name:
                        return i, j
        raise KeyError(f"unknown node {name!r}")

    def default_c_sigma(self, node: str) -> float:
        """Node shunt capacitance plus the series caps touching it (C_q + C_qr)."""
        i, j = self.locate_node(node)
        els = self.chain[i].elements
        total = els[j].cground
        for k in (j - 1, j + 1):
            if 0 <= k < len(els) and isinstance(els[k], SeriesCap):
                total += els[k].c
        return total

    def element(self, name: str) -> Element:
        for _, el in self.iter_elements():
            if getattr(el, "name", None) == name:
                return el
        raise ParameterPathError(name)

    def _resolve(self, path: str) -> tuple[str, str]:
        names = {getattr(el, "name", None): el for _, el in self.iter_elements()}
        if path in names and type(names[path]) in _FIELDS:
            el = names[path]
            return path, next(iter(_FIELDS[type(el)].values()))
        if "." in path:
            head, key = path.rsplit(".", 1)
            el = names.get(head)
            if el is not None and key in _FIELDS.get(type(el), {}):
                return head, _FIELDS[type(el)][key]
        raise ParameterPathError(f"cannot resolve parameter path {path!r}")

    def get_value(self, path: str) -> float:
        name, attr = self._resolve(path)
        return getattr(self.element(name), attr)

    def with_value(self, path: str, value: float) -> "Netlist":
        """Copy of the netlist with one numeric field replaced."""
        name, attr = self._resolve(path)
        if not value > 0:
            raise ValueError(f"{path} must be positive, got {value!r}")

        def swap(el):
            if getattr(el, "name", None) == name and not isinstance(el, Branch):
                return dataclasses.replace(el, **{attr: float(value)})
            return el

        chain = []
        for item in self.chain:
            if isinstance(item, Branch):
                item = dataclasses.replace(item, elements=tuple(swap(e) for e in item.elements))
            chain.append(swap(item))
        return dataclasses.replace(self, chain=tuple(chain))


# --------------------------------------------------------------------------
# parser

_CHAIN_KINDS = {"tline", "cap", "stub", "lc", "branch"}
_BRANCH_KINDS = {"tline", "cap", "stub", "lc", "node", "short", "open"}


@dataclass
class _State:
    velocity: Optional[float] = None
    ztl: Optional[float] = None
    ports: dict = field(default_factory=dict)
    chain: list = field(default_factory=list)
    branch: Optional[dict] = None
    counters: dict = field(default_factory=dict)
    names: set = field(default_factory=set)
    node_names: set = field(default_factory=set)


def _number(text: str, key: str, lineno: int, positive: bool = True) -> float:
    try:
        val = float(text)
    except ValueError:
        raise NetlistError(f"{key}: not a number: {text!r}", lineno) from None
    if val != val or val in (float("inf"), float("-inf")):
        raise NetlistError(f"{key}: must be finite", lineno)
    if positive and val <= 0:
        raise NetlistError(f"{key} must be positive, got {text}", lineno)
    return val


def _kv(tokens: list[str], allowed: set[str], lineno: int) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise NetlistError(f"expected key=value, got {tok!r}", lineno)
        k, v = tok.split("=", 1)
        if k not in allowed:
            raise NetlistError(f"unknown key {k!r} (allowed: {', '.join(sorted(allowed))})", lineno)
        if k in out:
            raise NetlistError(f"duplicate key {k!r}", lineno)
        out[k] = v
    return out


def _auto_name(st: _State, kind: str, given: Optional[str], prefix: str, lineno: int) -> str:
    if given:
        name = given
    else:
        st.counters[kind] = st.counters.get(kind, 0) + 1
        name = f"{prefix}{kind}{st.counters[kind]}"
    if name in st.names:
        raise NetlistError(f"duplicate element name {name!r}", lineno)
    st.names.add(name)
    return name


def _element(st: _State, kind: str, args: list[str], lineno: int, prefix: str):
    if kind in ("tline", "stub"):
        kv = _kv(args, {"z", "len", "name"}, lineno)
        if "len" not in kv:
            raise NetlistError(f"{kind} requires len=", lineno)
        length = _number(kv["len"], "len", lineno)
        if "z" in kv:
            z = _number(kv["z"], "z", lineno)
        elif st.ztl is not None:
            z = st.ztl
        else:
            raise NetlistError(f"{kind} has no z= and no default ztl was set", lineno)
        name = _auto_name(st, kind, kv.get("name"), prefix, lineno)
        return (Line if kind == "tline" else OpenStub)(z, length, name)
    if kind == "cap":
        kv = _kv(args, {"c", "name"}, lineno)
        if "c" not in kv:
            raise NetlistError("cap requires c=", lineno)
        return SeriesCap(_number(kv["c"], "c", lineno), _auto_name(st, kind, kv.get("name"), prefix, lineno))
    if kind == "lc":
        kv = _kv(args, {"l", "c", "name"}, lineno)
        if "l" not in kv or "c" not in kv:
            raise NetlistError("lc requires l= and c=", lineno)
        return ShuntLC(_number(kv["l"], "l", lineno), _number(kv["c"], "c", lineno),
                       _auto_name(st, kind, kv.get("name"), prefix, lineno))
    if kind == "node":
        if not args or "=" in args[0]:
            raise NetlistError("node requires a name", lineno)
        name = args[0]
        kv = _kv(args[1:], {"cground", "fq"}, lineno)
        if name in st.node_names or name in st.names:
            raise NetlistError(f"duplicate node name {name!r}", lineno)
        st.node_names.add(name)
        st.names.add(name)
        cg = _number(kv["cground"], "cground", lineno, positive=False) if "cground" in kv else 0.0
        if cg < 0:
            raise NetlistError("cground must be non-negative", lineno)
        fq = _number(kv["fq"], "fq", lineno) if "fq" in kv else None
        return Node(name, cg, fq)
    raise NetlistError(f"unknown keyword {kind!r}", lineno)


def parse_netlist(text: str) -> Netlist:
    st = _State()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, *args = line.split()

        if st.branch is not None:
            br = st.branch
            if kind == "end":
                if args:
                    raise NetlistError("unexpected tokens after end", lineno)
                if not br["elements"]:
                    raise NetlistError(f"branch {br['name']!r} is empty", lineno)
                st.chain.append(Branch(br["name"], tuple(br["elements"]), br["term"] or "open"))
                st.branch = None
                continue
            if kind not in _BRANCH_KINDS:
                raise NetlistError(f"unknown keyword {kind!r} inside branch", lineno)
            if br["term"]:
                raise NetlistError(f"{kind} after branch termination {br['term']!r}", lineno)
            if kind in ("short", "open"):
                if args:
                    raise NetlistError(f"{kind} takes no arguments", lineno)
                br["term"] = kind
                continue
            el = _element(st, kind, args, lineno, br["name"] + ".")
            if isinstance(el, Node) and el.fq is not None and any(
                    isinstance(e, Node) and e.fq is not None for e in br["elements"]):
                raise NetlistError(f"branch {br['name']!r} already has a qubit node (fq=)", lineno)
            br["elements"].append(el)
            continue

        if kind == "param":
            it = iter(args)
            for key in it:
                val = next(it, None)
                if val is None:
                    raise NetlistError(f"param {key} needs a value", lineno)
                if key == "eps_eff":
                    st.velocity = C0 / _number(val, key, lineno) ** 0.5
                elif key == "velocity":
                    st.velocity = _number(val, key, lineno)
                elif key == "ztl":
                    st.ztl = _number(val, key, lineno)
                else:
                    raise NetlistError(f"unknown param {key!r}", lineno)
        elif kind == "port":
            if len(args) != 2 or args[0] not in ("in", "out"):
                raise NetlistError("expected: port in|out z=<ohm>", lineno)
            kv = _kv(args[1:], {"z"}, lineno)
            if "z" not in kv:
                raise NetlistError("port requires z=", lineno)
            if args[0] in st.ports:
                raise NetlistError(f"duplicate port {args[0]!r}", lineno)
            st.ports[args[0]] = _number(kv["z"], "z", lineno)
        elif kind == "branch":
            if len(args) != 1:
                raise NetlistError("expected: branch <name>", lineno)
            if args[0] in st.names:
                raise NetlistError(f"duplicate element name {args[0]!r}", lineno)
            st.names.add(args[0])
            st.branch = {"name": args[0], "elements": [], "term": None}
        elif kind in _CHAIN_KINDS:
            st.chain.append(_element(st, kind, args, lineno, ""))
        elif kind in ("end", "node", "short", "open"):
            raise NetlistError(f"{kind!r} is only valid inside a branch", lineno)
        else:
            raise NetlistError(f"unknown keyword {kind!r}", lineno)

    if st.branch is not None:
        raise NetlistError(f"branch {st.branch['name']!r} is missing 'end'")
    for port in ("in", "out"):
        if port not in st.ports:
            raise NetlistError(f"missing directive: port {port}")
    needs_v = any(isinstance(el, (Line, OpenStub)) for _, el in
                  Netlist(tuple(st.chain), 1, 1, 1).iter_elements())
    if needs_v and st.velocity is None:
        raise NetlistError("missing directive: param eps_eff|velocity (required by transmission lines)")
    return Netlist(tuple(st.chain), st.ports["in"], st.ports["out"], st.velocity or C0, st.ztl)


def load_netlist(path) -> Netlist:
    return parse_netlist(Path(path).read_text(encoding="utf-8"))


def _fmt(x: float) -> str:
    return repr(float(x))


def format_element(el: Element, indent: str = "") -> str:
    if isinstance(el, Line):
        return f"{indent}tline z={_fmt(el.z)} len={_fmt(el.length)} name={el.name}"
    if isinstance(el, OpenStub):
        return f"{indent}stub z={_fmt(el.z)} len={_fmt(el.length)} name={el.name}"
    if isinstance(el, SeriesCap):
        return f"{indent}cap c={_fmt(el.c)} name={el.name}"
    if isinstance(el, ShuntLC):
        return f"{indent}lc l={_fmt(el.l)} c={_fmt(el.c)} name={el.name}"
    if isinstance(el, Node):
        extra = f" cground={_fmt(el.cground)}" if el.cground else ""
        extra += f" fq={_fmt(el.fq)}" if el.fq is not None else ""
        return f"{indent}node {el.name}{extra}"
    if isinstance(el, Branch):
        body = "\n".join(format_element(e, "  ") for e in el.elements)
        return f"branch {el.name}\n{body}\n  {el.termination}\nend"
    raise TypeError(el)


def format_netlist(net: Netlist) -> str:
    """Inverse of :func:`parse_netlist` (names are always written explicitly)."""
    lines = [f"param velocity {_fmt(net.velocity)}" + (f" ztl {_fmt(net.ztl)}" if net.ztl else ""),
             f"port in z={_fmt(net.z_in)}", f"port out z={_fmt(net.z_out)}"]
    lines += [format_element(item) for item in net.chain]
    return "\n".join(lines) + "\n"
