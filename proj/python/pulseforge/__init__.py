"""Neural pulse-sequence controller for an oscillator-qubit system.

The compiled extension carries the full surface; this package re-exports it
and adds a tiny convenience wrapper for command-line style invocation.
"""

try:
    from ._pulseforge import (  # noqa: F401
        ConfigurationError,
        Evaluation,
        Model,
        NumericalFailure,
        PulseParams,
        PulseSequence,
        RefineResult,
        SystemConfig,
        __version__,
        bloch_to_state,
        cli_main,
        evaluate_sequence,
        featurize,
        haar_dataset,
        load_checkpoint,
        mix_seed,
        refine,
        save_checkpoint,
        su_basis,
    )
except ImportError:  # build-tree layout: extension next to the package dir
    from _pulseforge import (  # noqa: F401
        ConfigurationError,
        Evaluation,
        Model,
        NumericalFailure,
        PulseParams,
        PulseSequence,
        RefineResult,
        SystemConfig,
        __version__,
        bloch_to_state,
        cli_main,
        evaluate_sequence,
        featurize,
        haar_dataset,
        load_checkpoint,
        mix_seed,
        refine,
        save_checkpoint,
        su_basis,
    )

__all__ = [
    "ConfigurationError",
    "Evaluation",
    "Model",
    "NumericalFailure",
    "PulseParams",
    "PulseSequence",
    "RefineResult",
    "SystemConfig",
    "__version__",
    "bloch_to_state",
    "cli_main",
    "evaluate_sequence",
    "featurize",
    "haar_dataset",
    "load_checkpoint",
    "main",
    "mix_seed",
    "refine",
    "save_checkpoint",
    "su_basis",
]


def main(argv=None):
    """Entry point mirroring the standalone executable."""
    import sys

    args = list(sys.argv[1:] if argv is None else argv)
    return cli_main(args)
