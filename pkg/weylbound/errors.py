class WeylBoundError(Exception): ...
class ValidationError(WeylBoundError): ...
class DomainError(WeylBoundError): ...
class UnsupportedError(DomainError): ...
class WindowError(DomainError): ...
class RootBracketError(DomainError): ...
class ConvergenceError(WeylBoundError): ...
class RootScanError(ConvergenceError): ...
class SpectrumFileError(WeylBoundError): ...
