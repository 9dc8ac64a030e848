"""
Query plans of the main engine.

A 3-path u -> w -> x -> v falls into one fine key (class of w, class of x, phase of the
A edge, phase of the B edge, phase of the C edge). For every pair of endpoint classes a
plan lists the methods that answer the query, and every plan must cover each of the 72
fine keys exactly once.
"""

from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, List, Mapping, Optional, Set, Tuple

from modules.engines.main.stores import PHASES, StoreSpec
from modules.params.classes import ENDPOINT_CLASSES, MIDDLE_CLASSES

Key = Tuple[str, str, str, str, str]
ClassPair = Tuple[str, str]

ALL_MIDDLE = frozenset(MIDDLE_CLASSES)
ALL_PHASES = frozenset(PHASES)
ALL_KEYS: FrozenSet[Key] = frozenset(product(MIDDLE_CLASSES, MIDDLE_CLASSES, PHASES, PHASES, PHASES))

# method kinds
PAIRS = "pairs"
WALK_U = "walk_u"
WALK_V = "walk_v"
VIA_W = "via_w"
VIA_X = "via_x"
VIA_DENSE_W = "via_dense_w"
VIA_DENSE_X = "via_dense_x"
TRIPLE = "triple"
WARMUP = "warmup"

NBR = "nbr"
DENSE = "dense"


@dataclass(frozen=True)
class Method:
    """
    One summand of a query plan.

    cw/cx restrict the classes iterated over and pa/pb/pc the phases read from the
    graph; stores contribute their own filters on top.
    """

    kind: str
    store: Optional[str] = None
    cw: FrozenSet[str] = ALL_MIDDLE
    cx: FrozenSet[str] = ALL_MIDDLE
    pa: FrozenSet[str] = ALL_PHASES
    pb: FrozenSet[str] = ALL_PHASES
    pc: FrozenSet[str] = ALL_PHASES
    left: str = NBR
    right: str = NBR

    @property
    def label(self) -> str:
        parts = [self.kind]
        if self.store:
            parts.append(self.store)
        if self.kind == PAIRS:
            parts.append(f"{self.left}x{self.right}")
        for name in ("cw", "cx"):
            value = getattr(self, name)
            if value != ALL_MIDDLE:
                parts.append(f"{name}={''.join(sorted(value))}")
        for name in ("pa", "pb", "pc"):
            value = getattr(self, name)
            if value != ALL_PHASES:
                parts.append(f"{name}={''.join(sorted(value))}")
        return ":".join(parts)


def _s(*values: str) -> FrozenSet[str]:
    return frozenset(values)


def _phases(spec: StoreSpec, i: int) -> FrozenSet[str]:
    return frozenset(spec.phase_set(i))


def method_keys(method: Method, catalog: Mapping[str, StoreSpec], cu: str, cv: str) -> Set[Key]:
    """
    Fine keys a method counts for endpoints of classes cu and cv.

    Raises:
        ValueError: If the method's store excludes the endpoint classes
    """
    if method.kind in (PAIRS, WALK_U, WALK_V):
        cw, cx, pa, pb, pc = method.cw, method.cx, method.pa, method.pb, method.pc
    elif method.kind == WARMUP:
        pair = method.store
        cw, cx, pa, pb, pc = _s(pair[0]), _s(pair[1]), _s("o"), _s("n"), _s("o")
    else:
        spec = catalog[method.store]
        if method.kind in (VIA_W, VIA_DENSE_W):
            _require(spec, 2, cv, method)
            cw = method.cw & spec.allowed(0)
            cx = spec.allowed(1)
            pa, pb, pc = method.pa, _phases(spec, 0), _phases(spec, 1)
        elif method.kind in (VIA_X, VIA_DENSE_X):
            _require(spec, 0, cu, method)
            cw = spec.allowed(1)
            cx = method.cx & spec.allowed(2)
            pa, pb, pc = _phases(spec, 0), _phases(spec, 1), method.pc
        elif method.kind == TRIPLE:
            _require(spec, 0, cu, method)
            _require(spec, 3, cv, method)
            cw, cx = spec.allowed(1), spec.allowed(2)
            pa, pb, pc = _phases(spec, 0), _phases(spec, 1), _phases(spec, 2)
        else:
            raise ValueError(f"Unknown method kind: {method.kind}")
    return set(product(cw, cx, pa, pb, pc))


def _require(spec: StoreSpec, pos: int, cls: str, method: Method) -> None:
    if cls not in spec.allowed(pos):
        raise ValueError(f"{method.label} cannot serve endpoint class {cls}")


def _plan(cu: str, cv: str) -> List[Method]:
    """Methods for one endpoint class pair."""
    big = ("M", "H")
    methods: List[Method] = []

    # tiny endpoints
    if cu == "T" or cv == "T":
        if cu in ("T", "L") and cv in ("T", "L"):
            return [Method(PAIRS)]
        if cu == "T":
            return [
                Method(PAIRS, cx=_s("D"), right=DENSE),
                Method(VIA_W, "bc_s"),
                Method(VIA_W, "bc_t"),
            ]
        return [
            Method(PAIRS, cw=_s("D"), left=DENSE),
            Method(VIA_X, "ab_s"),
            Method(VIA_X, "ab_t"),
        ]

    # paths through tiny intermediates
    if cu != "H" and cv != "H":
        methods += [Method(VIA_W, "bc_t"), Method(VIA_X, "ab_t", cx=_s("S", "D"))]
    elif (cu, cv) == ("H", "H"):
        methods += [
            Method(TRIPLE, "aht_tt_th"),
            Method(TRIPLE, "aht_ts_sh"),
            Method(TRIPLE, "ahs_st_th"),
            Method(VIA_DENSE_X, "ab_t", cx=_s("D")),
            Method(VIA_DENSE_W, "bc_t", cw=_s("D")),
        ]
    elif (cu, cv) == ("H", "M"):
        methods += [
            Method(TRIPLE, "aht_tt_tm"),
            Method(VIA_X, "ab_t", cx=_s("S", "D")),
            Method(VIA_DENSE_W, "bc_t", cw=_s("D")),
            Method(VIA_X, "ab_s", cx=_s("T")),
        ]
    elif (cu, cv) == ("M", "H"):
        methods += [
            Method(TRIPLE, "amt_tt_th"),
            Method(VIA_W, "bc_t", cw=_s("S", "D")),
            Method(VIA_DENSE_X, "ab_t", cx=_s("D")),
            Method(VIA_W, "bc_s", cw=_s("T")),
        ]
    elif (cu, cv) == ("H", "L"):
        methods += [Method(WALK_V, cx=_s("T")), Method(VIA_X, "ab_t", cx=_s("S", "D"))]
    else:
        methods += [Method(WALK_U, cw=_s("T")), Method(VIA_W, "bc_t", cw=_s("S", "D"))]

    # paths through sparse and dense intermediates
    if cu in big and cv in big:
        methods += [
            Method(VIA_DENSE_X, f"ab_{cu.lower()}d_dd", cx=_s("D")),
            Method(VIA_DENSE_X, "ab_s", cx=_s("D")),
            Method(VIA_DENSE_W, "bc_s", cw=_s("D")),
        ]
        if cu == "M":
            methods.append(Method(VIA_W, "bc_s", cw=_s("S")))
        elif cv == "M":
            methods.append(Method(VIA_X, "ab_s", cx=_s("S")))
        else:
            methods += [Method(TRIPLE, "old_abc_SS"), Method(WARMUP, "SS")]
            methods += [Method(TRIPLE, f"abc_hssh_{p}") for p in ("nnn", "nno", "onn", "non", "noo", "oon")]
    elif cu in big:
        methods += [
            Method(VIA_X, "ab_s", cx=_s("S", "D")),
            Method(VIA_X, f"ab_{cu.lower()}d_dd", cx=_s("D")),
            Method(VIA_DENSE_W, "bc_s", cw=_s("D")),
        ]
    elif cv in big:
        methods += [
            Method(VIA_W, "bc_s", cw=_s("S", "D")),
            Method(VIA_W, f"bc_dd_d{cv.lower()}", cw=_s("D")),
            Method(VIA_DENSE_X, "ab_s", cx=_s("D")),
        ]
    else:
        d, n, o = _s("D"), _s("n"), _s("o")
        methods += [
            Method(VIA_W, "bc_s", cw=_s("S", "D")),
            Method(VIA_X, "ab_s", cx=d),
            Method(VIA_X, "old_ab_DD", cx=d),
            Method(VIA_W, "old_bc_DD", cw=d, pa=n),
            Method(VIA_X, "ab_nd_odd", cx=d, pc=n),
            Method(PAIRS, cw=d, cx=d, pa=n, pb=n),
            Method(PAIRS, cw=d, cx=d, pa=o, pb=n, pc=n),
            Method(WARMUP, "DD"),
        ]
    return methods


def build_plans(catalog: Mapping[str, StoreSpec]) -> Dict[ClassPair, List[Method]]:
    """
    Plans for every endpoint class pair, checked to partition the fine keys.

    Raises:
        ValueError: If a plan double-counts or misses a key
    """
    plans = {}
    for cu, cv in product(ENDPOINT_CLASSES, ENDPOINT_CLASSES):
        methods = _plan(cu, cv)
        seen: Set[Key] = set()
        for method in methods:
            keys = method_keys(method, catalog, cu, cv)
            overlap = seen & keys
            if overlap:
                raise ValueError(f"Plan {cu}{cv}: {method.label} recounts {sorted(overlap)[:3]}")
            seen |= keys
        missing = ALL_KEYS - seen
        if missing:
            raise ValueError(f"Plan {cu}{cv} misses {len(missing)} keys, e.g. {sorted(missing)[:3]}")
        plans[(cu, cv)] = methods
    return plans

