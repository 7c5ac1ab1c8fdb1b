from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class RunManifest:
    """Provenance written next to every command output."""
    command: str
    options: dict
    seed: int
    version: str
    wall_time: float
    digests: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> 'RunManifest':
        missing = {'command', 'options', 'seed', 'version'} - set(payload)
        if missing:
            raise ValueError(f'Manifest is missing {sorted(missing)}')
        return cls(
            command=payload['command'],
            options=dict(payload['options']),
            seed=payload['seed'],
            version=payload['version'],
            wall_time=float(payload.get('wall_time', 0.0)),
            digests=dict(payload.get('digests', {})),
        )
