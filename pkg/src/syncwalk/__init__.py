"""Synchronization of deterministic automata under random letter streams."""
from .analysis import (
    ResetReport, is_sync_word, is_synchronizing, pair_reset_length, reset_threshold,
)
from .automaton import Automaton, StateSet, apply_letter, apply_word, validate
from .closed_forms import (
    optimal_p_analysis, thm1_un_odd, thm2_un_even, thm3_cerny_odd, thm4_cerny_even,
)
from .errors import (
    DomainError, EstimateTruncated, InvalidAutomaton, NotAbsorbing, NotSynchronizing,
    PairNotSynchronizable, ResourceExceeded, SingularSystem, SyncError, TruncationRefused,
)
from .generators import (
    SINK, check_isomorphism, gen_cerny, gen_pn, gen_un, pair_automaton, pair_iso_map,
)
from .markov import (
    AbsorbingChain, HittingTimeVector, LetterDistribution, argmax_pair,
    build_pair_chain, build_subset_chain, expected_pair_time, expected_sync_time,
    solve_expected,
)
from .montecarlo import BernoulliSource, Estimate, estimate, run_trial

__version__ = "0.1.0"
