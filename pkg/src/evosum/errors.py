"""Exception hierarchy shared by every module of the package."""


class EvosumError(Exception):
    """Base class for data and validation errors (CLI exit code 2)."""


class OntologyError(EvosumError):
    pass


class OntologyParseError(OntologyError):
    pass


class OntologyCycleError(OntologyError):
    pass


class DuplicateIdError(OntologyError):
    pass


class DanglingParentError(OntologyError):
    pass


class UnknownConceptError(OntologyError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownInstanceError(OntologyError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SchemaError(EvosumError):
    pass


class UnknownSchemaError(SchemaError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class TimeResolutionError(SchemaError, ValueError):
    pass


class PredicateError(EvosumError):
    pass


class ClassifierError(EvosumError):
    pass


class ArgFillError(EvosumError):
    pass


class GridError(EvosumError):
    pass


class DuplicateMessageError(GridError):
    pass


class UnknownSourceError(GridError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class RelationSpecError(EvosumError):
    pass


class QueryError(EvosumError):
    pass


class TemplateError(EvosumError):
    pass


class EvaluationError(EvosumError):
    pass


class CorpusError(EvosumError):
    pass
