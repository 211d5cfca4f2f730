"""Exception hierarchy shared by every part of the package."""


class MagintError(Exception):
    pass


class ExprSyntaxError(MagintError, ValueError):
    def __init__(self, message, text="", offset=0):
        super().__init__(f"{message} (at byte {offset})")
        self.text = text
        self.offset = offset


class NonlinearAtomError(MagintError, ValueError):
    def __init__(self, message, atom=None):
        super().__init__(message)
        self.atom = atom


class NormalFormError(MagintError, ArithmeticError):
    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class UnboundSymbolError(MagintError, KeyError):
    def __init__(self, names):
        self.names = sorted(str(n) for n in names)
        super().__init__(f"unbound symbols: {', '.join(self.names)}")

    def __str__(self):
        return self.args[0]


class DenominatorGuardError(MagintError, ArithmeticError):
    def __init__(self, factor, value, guard):
        super().__init__(f"denominator {factor} = {value:.3e} is below the guard {guard:g}")
        self.factor = factor
        self.value = value
        self.guard = guard


class ChartMismatchError(MagintError, ValueError):
    pass


class GaugeError(MagintError, ValueError):
    pass


class BracketDegreeError(MagintError, ValueError):
    pass


class ConstraintError(MagintError, ValueError):
    pass


class UnknownSystemError(MagintError, KeyError):
    def __init__(self, name):
        super().__init__(f"unknown system: {name}")
        self.name = name

    def __str__(self):
        return self.args[0]


class UnknownFixtureError(MagintError, KeyError):
    def __init__(self, name):
        super().__init__(f"unknown fixture: {name}")
        self.name = name

    def __str__(self):
        return self.args[0]


class IntegrationError(MagintError, RuntimeError):
    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class ConfigError(MagintError, ValueError):
    pass
