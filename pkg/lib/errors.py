#%%
# Exception Hierarchy
# -----------------------------------------------------------------------------------------
"""Every failure raised by the library derives from RulefuseError.

Bad-value failures also derive from ValueError so plain ``except ValueError``
callers keep working.
"""


class RulefuseError(Exception):
    """Base class for all pipeline errors."""


class ConfigError(RulefuseError, ValueError):
    """Invalid configuration value, range or missing file."""


class SchemaError(RulefuseError, ValueError):
    """A column required by the schema is missing or the schema is malformed."""

    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"schema error: column '{column}'")


class DataParseError(RulefuseError, ValueError):
    """A cell could not be parsed; row is the 0-based data row."""

    def __init__(self, row, column, value):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}: cannot parse column '{column}' value {value!r}")


class LabelError(RulefuseError, ValueError):
    def __init__(self, row, value):
        self.row = row
        self.value = value
        super().__init__(f"row {row}: label {value!r} is not 0 or 1")


class SplitError(RulefuseError, ValueError):
    """A split would leave the train or test side empty."""


class SchemaMismatchError(RulefuseError, ValueError):
    """Data handed to a fitted model does not match the schema it was fitted on."""

    def __init__(self, feature, message=None):
        self.feature = feature
        super().__init__(message or f"schema mismatch on feature '{feature}'")


class RuleSyntaxError(RulefuseError, ValueError):
    """Rule file could not be parsed. line/col are 1-based."""

    def __init__(self, message, line, col):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}")


class RuleBindError(RulefuseError, ValueError):
    """A rule references a feature the schema does not have, or uses it with the wrong kind."""

    def __init__(self, rule, feature, message=None):
        self.rule = rule
        self.feature = feature
        super().__init__(message or f"rule '{rule}': unknown feature '{feature}'")


class RuleEvaluationError(RulefuseError, KeyError):
    def __init__(self, feature):
        self.feature = feature
        super().__init__(f"row has no value for feature '{feature}'")

    def __str__(self):
        return self.args[0]


class CoverageError(RulefuseError, ValueError):
    """Coverage is undefined because the dataset holds no churn rows."""


class CodecError(RulefuseError, ValueError):
    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"(y, e) pair {pair} was not observed at fit time")


class ModelError(RulefuseError, ValueError):
    """Model input has the wrong shape or the training data is unusable."""


class StageError(RulefuseError):
    """A pipeline stage failed; cause holds the original exception."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
