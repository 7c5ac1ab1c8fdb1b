"""
Runtime failures raised by the services.

Precondition violations raise ValueError; the classes here cover failures
that happen while a valid computation is running.
"""


class RejectionCapExceeded(RuntimeError):
    """A rejection sampler ran out of attempts before filling its request."""

    def __init__(self, attempts: int, accepted: int, requested: int):
        self.attempts = attempts
        self.accepted = accepted
        self.requested = requested
        super().__init__(
            f'Rejection sampler stopped after {attempts} attempts with '
            f'{accepted}/{requested} accepted (acceptance rate {self.acceptance_rate:.3g})'
        )

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0


class EventEvaluationError(RuntimeError):
    """An event predicate failed on one Monte Carlo chunk; the key replays it."""

    def __init__(self, seed: int, chunk_index: int, cause: BaseException):
        self.seed = seed
        self.chunk_index = chunk_index
        self.cause = cause
        super().__init__(
            f'Event evaluation failed on substream (seed={seed}, chunk={chunk_index}): '
            f'{type(cause).__name__}: {cause}'
        )

    @property
    def substream_key(self) -> tuple[int, int]:
        return self.seed, self.chunk_index
