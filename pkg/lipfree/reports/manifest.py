# The MIT License (MIT)
# Copyright © 2024 lipfree developers

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.


from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Sequence

from lipfree.protocol import to_wire
from lipfree.utils.misc import canonical_json, sha256_of, sha256_text


@dataclass(frozen=True)
class RunManifest:
    """
    Everything needed to rerun a report: the command, where the space came from,
    seeds, parameter values, hashes of input files and the tool version.

    Holds no timestamps, so equal runs produce byte-identical reports.
    """

    command: str
    provenance: Mapping[str, Any]
    params: Mapping[str, Any] = field(default_factory=dict)
    seeds: Sequence[int] = ()
    artifact_hashes: Mapping[str, str] = field(default_factory=dict)
    version: str = ""

    @classmethod
    def build(cls, command: str, provenance, params=None, seeds=(), inputs=()) -> "RunManifest":
        from lipfree import __version__

        hashes = {Path(p).name: sha256_of(p) for p in inputs if p}
        return cls(command, dict(provenance), dict(params or {}), tuple(seeds), hashes, __version__)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "provenance": to_wire(self.provenance),
            "params": to_wire(self.params),
            "seeds": list(self.seeds),
            "artifact_hashes": dict(sorted(self.artifact_hashes.items())),
            "version": self.version,
        }

    @property
    def digest(self) -> str:
        return sha256_text(canonical_json(self.to_dict()))
