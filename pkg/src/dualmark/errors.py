"""Exception and warning types raised by dualmark."""


class DualmarkError(Exception):
    """Base class for all dualmark errors."""


class InvalidInput(DualmarkError, ValueError):
    pass


class DegenerateFrame(DualmarkError):
    """A frame's largest singular value is zero, so a bit cannot be carried."""

    def __init__(self, domain, frames):
        self.domain = domain
        self.frames = list(frames)
        shown = ", ".join(str(i) for i in self.frames[:20])
        more = "" if len(self.frames) <= 20 else f" (+{len(self.frames) - 20} more)"
        super().__init__(f"{domain}: zero largest singular value in frame(s) {shown}{more}")


class InvalidKey(DualmarkError, ValueError):
    pass


class UnsupportedFormat(DualmarkError):
    pass


class CorruptFile(DualmarkError):
    pass


class LikelyDesync(UserWarning):
    """Extraction ran on a signal whose framing probably no longer lines up."""
