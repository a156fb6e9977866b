from .agent import Adam, SacAgent, SacConfig
from .nets import DenseNet, GaussianPolicy, QNetwork
from .replay import ReplayBuffer
from .tensor import Tensor, concat, minimum, tensor
from .train import TrainResult, episode_return, train

__all__ = [
    "Adam",
    "SacAgent",
    "SacConfig",
    "DenseNet",
    "GaussianPolicy",
    "QNetwork",
    "ReplayBuffer",
    "Tensor",
    "tensor",
    "concat",
    "minimum",
    "TrainResult",
    "train",
    "episode_return",
]
