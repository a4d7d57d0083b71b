class SinkhornParams:
    """Parameters controlling the entropic (Sinkhorn) solvers

    Parameters
    ----------
    stop_threshold : float = 1e-9
        Iteration stops once the largest absolute marginal violation is below this
        value. The returned report is converged only if the final coupling meets it.
    max_iterations : int = 10000
        Maximum number of Sinkhorn iterations per solve.
    log_domain_threshold : float = 500.0
        Scaling iterations run in the log domain when ``lambda * max(C)`` exceeds this
        value. The log domain is also used whenever the standard-domain scaling vectors
        underflow or overflow.
    normalize_cost : bool = False
        If True, divide the cost matrix by its maximum entry before solving.
    newton_iterations : int = 50
        Maximum number of Newton steps on the dual potentials after the scaling
        iterations stop, either converged or stalled. Refinement continues to
        machine precision. Set to 0 to return the plain Sinkhorn iterate, in which
        case scaling runs until `stop_threshold` or `max_iterations`.
    """

    def __init__(
        self,
        stop_threshold: float = 1e-9,
        max_iterations: int = 10000,
        log_domain_threshold: float = 500.0,
        normalize_cost: bool = False,
        newton_iterations: int = 50,
    ):
        self.stop_threshold = float(stop_threshold)
        self.max_iterations = int(max_iterations)
        self.log_domain_threshold = float(log_domain_threshold)
        self.normalize_cost = bool(normalize_cost)
        self.newton_iterations = int(newton_iterations)

    def copy(self, **kwargs) -> "SinkhornParams":
        data = self.to_dict()
        data.update(kwargs)
        return SinkhornParams.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "stop_threshold": self.stop_threshold,
            "max_iterations": self.max_iterations,
            "log_domain_threshold": self.log_domain_threshold,
            "normalize_cost": self.normalize_cost,
            "newton_iterations": self.newton_iterations,
        }

    @staticmethod
    def from_dict(data: dict) -> "SinkhornParams":
        return SinkhornParams(**data)
