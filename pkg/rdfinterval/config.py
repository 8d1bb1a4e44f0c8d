"""Run configuration shared by the command-line commands."""
import logging
import os
from dataclasses import dataclass, field


_LOGGER = logging.getLogger(__name__)
MAX_CODE_WIDTH = 128
BROADCAST_THRESHOLD = 10**6
PARTITIONS_ENV = "LITEMAT_PARTITIONS"
MAX_WIDTH_ENV = "LITEMAT_MAX_WIDTH"
BROADCAST_ENV = "LITEMAT_BCAST_THRESHOLD"


def default_partitions() -> int:
    """Number of partitions used when nothing else is configured.

    :returns:  number of available cores (at least 1)
    """
    return os.cpu_count() or 1


def _env_int(name, default) -> int:
    """Read an integer from the environment.

    :param str name:  environment variable name
    :param int default:  value when the variable is unset
    :returns:  integer value
    :raises ValueError:  if the variable is set but not an integer
    """
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        err = f"Environment variable {name} must be an integer, got {raw!r}."
        raise ValueError(err)
    _LOGGER.debug(f"Using {name}={value} from the environment.")
    return value


@dataclass
class RunConfig:
    """Parameters shared by every command.

    :param int partitions:  number of logical data partitions
    :param int max_code_width:  maximum code width in bits
    :param int broadcast_threshold:  largest map (entries) that is
        replicated to every partition worker instead of shuffled
    """

    partitions: int = field(default_factory=default_partitions)
    max_code_width: int = MAX_CODE_WIDTH
    broadcast_threshold: int = BROADCAST_THRESHOLD

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        """Build a configuration from the environment.

        Keyword arguments that are not ``None`` take precedence over the
        environment.

        :returns:  validated configuration
        """
        config = cls(
            partitions=_env_int(PARTITIONS_ENV, default_partitions()),
            max_code_width=_env_int(MAX_WIDTH_ENV, MAX_CODE_WIDTH),
            broadcast_threshold=_env_int(BROADCAST_ENV, BROADCAST_THRESHOLD),
        )
        for key, value in overrides.items():
            if value is not None:
                setattr(config, key, value)
        config.validate()
        return config

    def validate(self):
        """Check the configuration invariants.

        :raises ValueError:  if a field is out of range
        """
        if self.partitions < 1:
            err = f"Partition count must be at least 1, got {self.partitions}."
            raise ValueError(err)
        if self.max_code_width < 2:
            err = (
                f"Maximum code width must be at least 2 bits, got "
                f"{self.max_code_width}."
            )
            raise ValueError(err)
        if self.broadcast_threshold < 0:
            err = (
                f"Broadcast threshold must be non-negative, got "
                f"{self.broadcast_threshold}."
            )
            raise ValueError(err)
