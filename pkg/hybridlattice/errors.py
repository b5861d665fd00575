class HybridLatticeError(Exception):
    """Base class for every error raised by the library."""

    pass


class ConfigError(HybridLatticeError):
    """Used to parse configuration files when something went wrong."""

    def __init__(self, key, message):
        """Initializes an instance.

        :param key: Offending configuration key (dotted path)
        :type key: str
        :param message: Human readable description
        :type message: str
        """
        self.key = key
        self.message = message
        super(ConfigError, self).__init__(f'{key}: {message}')


class NonPositiveSplitting(HybridLatticeError):
    """The ensemble transition frequency is not positive (level crossing)."""

    pass


class SingularPosition(HybridLatticeError):
    """The loop field was requested at a non-positive distance."""

    pass


class RangeError(HybridLatticeError):
    """A profile grid point lies outside the open interval (0, 1)."""

    pass


class DimensionError(HybridLatticeError):
    """Operator dimensions do not fit the requested construction."""

    pass


class HermiticityError(HybridLatticeError):
    """A matrix handed to the eigensolver is not Hermitian."""

    def __init__(self, deviation):
        """Initializes an instance.

        :param deviation: max|H - H^dagger|
        :type deviation: float
        """
        self.deviation = deviation
        super(HermiticityError, self).__init__(
            f'Matrix is not Hermitian: max|H - H^+| = {deviation:.3e}'
        )


class ResonanceError(HybridLatticeError):
    """A coupled qubit-ensemble pair is not red-detuned (Delta <= 0)."""

    def __init__(self, pair, detuning):
        """Initializes an instance.

        :param pair: One-based (qubit, ensemble) indices
        :type pair: tuple
        :param detuning: Offending detuning in GHz
        :type detuning: float
        """
        self.pair = pair
        self.detuning = detuning
        super(ResonanceError, self).__init__(
            f'Qubit {pair[0]} and ensemble {pair[1]} are not in the '
            f'dispersive regime: detuning {detuning:.6g} GHz <= 0'
        )


class DetuningWarning(UserWarning):
    """The detuning is smaller than the configured multiple of J."""

    pass


class UnstableMode(HybridLatticeError):
    """A quasi-particle energy is not real (the array is unstable)."""

    def __init__(self, message, k=None, k_range=None):
        """Initializes an instance.

        :param message: Human readable description
        :type message: str
        :param k: Offending wave vector
        :type k: float or None
        :param k_range: Interval (k_min, k_max) of unstable grid points
        :type k_range: tuple or None
        """
        self.k = k
        self.k_range = k_range
        super(UnstableMode, self).__init__(message)


class DivergentCoefficients(HybridLatticeError):
    """Bogoliubov coefficients diverge at a gapless mode."""

    pass


class NoStableField(HybridLatticeError):
    """No external field keeps the array stable with a positive frequency."""

    pass


class ValidationFailure(HybridLatticeError):
    """One or more validation checks exceeded their tolerance."""

    def __init__(self, failed):
        """Initializes an instance.

        :param failed: Names of the failed checks
        :type failed: list
        """
        self.failed = list(failed)
        super(ValidationFailure, self).__init__(
            'Failed checks: ' + ', '.join(self.failed)
        )
