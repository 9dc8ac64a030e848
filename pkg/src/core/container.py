"""
Engine registry for the fourcycle counters.

Maps (engine, mode) to a factory that builds a CycleCounterInterface from the validated
configuration dictionary, so the CLI never imports engine classes directly.
"""

import logging
from functools import partial
from typing import Any, Callable, Dict, Optional, Tuple

from core.errors import InvalidParam
from core.interfaces import CycleCounterInterface
from modules.engines.main import MainEngine
from modules.engines.naive import LayeredNaiveEngine, NaiveCycleCounter
from modules.engines.warmup import WarmupLayeredCounter
from modules.graph.counter import FourCopyCounter, GeneralReductionCounter
from modules.oracle.replay import GeneralOracleCounter, LayeredOracleCounter
from modules.params.constraints import ParamSet
from modules.params.thresholds import Thresholds, thresholds_for

logger = logging.getLogger(__name__)

CounterFactory = Callable[[Dict[str, Any]], CycleCounterInterface]


class Container:
    """Registry of counter factories keyed by (engine, mode)."""

    def __init__(self):
        """Initialize the registry."""
        self._factories: Dict[Tuple[str, str], CounterFactory] = {}
        logger.debug("Engine registry initialized")

    def register(self, engine: str, mode: str, factory: CounterFactory) -> None:
        """
        Register a factory.

        Args:
            engine: Engine name
            mode: general or layered
            factory: Callable config -> counter
        """
        logger.debug(f"Registering {engine}/{mode}")
        self._factories[(engine, mode)] = factory

    def supports(self, engine: str, mode: str) -> bool:
        return (engine, mode) in self._factories

    def resolve(self, config: Dict[str, Any]) -> CycleCounterInterface:
        """
        Build the counter selected by ``config['engine']``.

        Args:
            config: Validated configuration dictionary

        Returns:
            CycleCounterInterface: A fresh counter

        Raises:
            InvalidParam: If the engine does not support the mode
        """
        engine, mode = config["engine"]["engine"], config["engine"]["mode"]
        factory = self._factories.get((engine, mode))
        if factory is None:
            raise InvalidParam(f"Engine {engine!r} does not support {mode} streams")
        counter = factory(config)
        logger.info(f"Built {engine} counter for {mode} streams")
        return counter


def threshold_source(config: Dict[str, Any]) -> Callable[[int], Thresholds]:
    """Callable m -> Thresholds for the configured parameters."""
    engine_config = config["engine"]
    return partial(
        _thresholds,
        p=ParamSet.from_config(config["params"]),
        budget_multiplier=engine_config["budget_multiplier"],
        bootstrap_min=engine_config["bootstrap_min"],
    )


def _thresholds(m: int, p: ParamSet, budget_multiplier: float, bootstrap_min: int) -> Thresholds:
    return thresholds_for(m, p, budget_multiplier=budget_multiplier, bootstrap_min=bootstrap_min)


def fixed_thresholds(config: Dict[str, Any]) -> Optional[Thresholds]:
    """Thresholds at the configured reference edge count, or None when m tracks the graph."""
    reference = config["params"].get("reference_edges")
    if reference is None:
        return None
    return threshold_source(config)(reference)


def _main_engine(config: Dict[str, Any]) -> MainEngine:
    engine_config = config["engine"]
    return MainEngine(
        thresholds=fixed_thresholds(config),
        threshold_source=threshold_source(config),
        rebuild_policy=engine_config["rebuild_policy"],
        strict_deadlines=engine_config["strict_deadlines"],
        transition_slack=engine_config["transition_slack"],
        backend=config["matmul"]["backend"],
    )


def _warmup_counter(config: Dict[str, Any]) -> WarmupLayeredCounter:
    return WarmupLayeredCounter(
        thresholds=fixed_thresholds(config),
        threshold_source=threshold_source(config),
        strict=config["engine"]["strict_deadlines"],
    )


def create_container() -> Container:
    """
    Create a registry with every shipped engine.

    Returns:
        Container: Configured registry
    """
    container = Container()
    container.register("naive", "general", lambda config: NaiveCycleCounter())
    container.register("naive", "layered", lambda config: FourCopyCounter(LayeredNaiveEngine))
    container.register("warmup", "layered", _warmup_counter)
    container.register("main", "general", lambda config: GeneralReductionCounter(partial(_main_engine, config)))
    container.register("main", "layered", lambda config: FourCopyCounter(partial(_main_engine, config)))
    container.register("oracle", "general", lambda config: GeneralOracleCounter())
    container.register("oracle", "layered", lambda config: LayeredOracleCounter())
    logger.debug("Engine registry configured")
    return container


def build_counter(config: Dict[str, Any]) -> CycleCounterInterface:
    """Shortcut: build the configured counter from a fresh registry."""
    return create_container().resolve(config)


def build_oracle(config: Dict[str, Any]) -> CycleCounterInterface:
    """The oracle counter for the configured mode."""
    return create_container().resolve({**config, "engine": {**config["engine"], "engine": "oracle"}})
