from .model import ProblemSpec, State
