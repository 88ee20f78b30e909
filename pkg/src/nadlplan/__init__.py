"""Symbolic universal planning for non-deterministic multi-agent domains."""
from .bdd import BddError, BddManager, NodeRef
from .domains import generate
from .encoder import Encoding, TransitionSystem, encode_domain
from .nadl import NadlError, load_domain, parse, validate
from .planning import (ALGORITHMS, OPTIMISTIC, STRONG, STRONG_CYCLIC, PlanOutcome, UniversalPlan,
                       advice, plan, sequential_plan)

__version__ = '0.1.0'

__all__ = [
    'ALGORITHMS', 'BddError', 'BddManager', 'Encoding', 'NadlError', 'NodeRef', 'OPTIMISTIC',
    'PlanOutcome', 'STRONG', 'STRONG_CYCLIC', 'TransitionSystem', 'UniversalPlan', 'advice',
    'encode_domain', 'generate', 'load_domain', 'parse', 'plan', 'sequential_plan', 'validate',
]
