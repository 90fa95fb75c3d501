"""mulab.origin

Provenance records: where an experiment result came from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from .rng import GENERATOR_NAME
from .version import __version__


@dataclass(frozen=True)
class Provenance:
    """
    Metadata describing how an experiment result was produced.

    - experiment: registry name of the runner
    - spec_text: the fully resolved key=value spec (defaults filled in)
    - spec_hash: sha256 of ``spec_text``
    - seed: base seed as "value:stream"; replica i uses ``seed.spawn(i)``
    - thresholds: verdict thresholds taken from the spec
    - code_version: mu-lab version that produced the result
    - generator: bit generator behind every Seed
    - note: extra context (e.g. rows outside proven regimes)

    Wall-clock time and worker count are not recorded; a result is a pure
    function of its spec.
    """

    experiment: str
    spec_text: str
    spec_hash: str
    seed: str
    thresholds: Tuple[Tuple[str, float], ...] = ()
    code_version: str = __version__
    generator: str = GENERATOR_NAME
    note: Optional[str] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "spec": self.spec_text,
            "spec_hash": self.spec_hash,
            "seed": self.seed,
            "thresholds": dict(self.thresholds),
            "code_version": self.code_version,
            "generator": self.generator,
            "note": self.note,
            "extra": dict(sorted(self.extra.items())),
        }
