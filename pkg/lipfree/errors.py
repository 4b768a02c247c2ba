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


from typing import Sequence


class LipfreeError(ValueError):
    """Root of every error raised by the package."""


class FormatError(LipfreeError):
    """Malformed input: bad JSON shape, unparsable rational, unknown point id."""


class PreconditionError(LipfreeError):
    """An operation was called outside its domain."""


class MetricViolation(LipfreeError):
    """
    A distance matrix breaks one of the metric axioms.

    Attributes:
        axiom (str): one of ``zero-diagonal``, ``positivity``, ``symmetry``, ``triangle``.
        witnesses (tuple): the offending point ids, in the order they were checked.
    """

    def __init__(self, axiom: str, witnesses: Sequence[str], message: str = ""):
        self.axiom = axiom
        self.witnesses = tuple(witnesses)
        super().__init__(
            message or f"{axiom} violation at {', '.join(self.witnesses)}"
        )
