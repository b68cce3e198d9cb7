"""
Marshmallow schemas for serializing command results into JSON documents.
Every top-level document carries `schema_version`; bump SCHEMA_VERSION when a
field changes meaning or disappears.
"""
from marshmallow import Schema, fields

from henondevaney.lib.formatting import jsonable, rational_str

SCHEMA_VERSION = 1


class Scalar(fields.Field):
    """
    A Fraction as "p/q", a float as itself.
    """

    def _serialize(self, value, attr, obj, **kwargs):
        if value is None:
            return None
        if isinstance(value, float):
            return jsonable(value)
        return rational_str(value)


class Plain(fields.Field):
    """
    Free-form details (dicts, lists, rationals) made JSON-safe.
    """

    def _serialize(self, value, attr, obj, **kwargs):
        return jsonable(value)


class DocumentSchema(Schema):
    schema_version = fields.Constant(SCHEMA_VERSION)


class PointSchema(Schema):
    x = Scalar()
    y = Scalar()


class TimedPointSchema(PointSchema):
    time = fields.Integer()


class TerminationSchema(Schema):
    kind = fields.String()
    time = fields.Integer()


class OrbitSchema(DocumentSchema):
    point = fields.Nested(PointSchema)
    points = fields.List(fields.Nested(TimedPointSchema))
    forward_termination = fields.Nested(TerminationSchema)
    backward_termination = fields.Nested(TerminationSchema)


class WordSchema(Schema):
    entries = fields.List(fields.Integer())
    status = fields.String()
    rendered = fields.Function(lambda word: str(word))


class SymbolSequenceSchema(Schema):
    symbols = fields.Function(lambda seq: list(seq.symbols()))
    origin = fields.Integer()
    past_terminated = fields.Boolean()
    future_terminated = fields.Boolean()
    rendered = fields.Function(lambda seq: seq.render())


class CodeSchema(DocumentSchema):
    point = fields.Nested(PointSchema)
    mirror = fields.Boolean()
    window = fields.Integer()
    i_word = fields.Nested(WordSchema)
    j_word = fields.Nested(WordSchema)
    h_i = fields.Nested(SymbolSequenceSchema)
    h_j = fields.Nested(SymbolSequenceSchema)


class SampleSchema(Schema):
    t = Scalar()
    x = Scalar()
    y = Scalar()


class BranchSchema(Schema):
    branch = Plain()
    samples = fields.List(fields.Nested(SampleSchema))


class CurvesSchema(DocumentSchema):
    family = fields.String()
    level = fields.Integer()
    discontinuity_params = fields.List(Scalar())
    branches = fields.List(fields.Nested(BranchSchema))


class CylinderSchema(DocumentSchema):
    i_prefix = fields.Nested(WordSchema)
    j_prefix = fields.Nested(WordSchema)
    search_box = Plain()
    point = fields.Nested(PointSchema)
    recoded = fields.Boolean()


class CurvePointSchema(DocumentSchema):
    i_word = fields.Nested(WordSchema)
    point = fields.Nested(PointSchema)


class PeriodicSchema(DocumentSchema):
    candidate = Plain()


class BooleSchema(DocumentSchema):
    operation = fields.String()
    result = Plain()


class NotFoundSchema(DocumentSchema):
    error = fields.String()
    message = fields.String()
    diagnostics = Plain()


class ReportSchema(DocumentSchema):
    suite = fields.String()
    seed = fields.Integer()
    passed = fields.Boolean()
    counts = Plain()
    results = Plain()


class ConfigSchema(DocumentSchema):
    config = Plain()
