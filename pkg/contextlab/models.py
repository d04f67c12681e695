"""
ContextLab Models

Pydantic models for the JSON file formats (behaviors, transform specs,
search configs) and conversions to and from the immutable core types.
"""
import hashlib
import json
import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError, field_validator

from .config import POST_PROCESS_FUNCTIONS
from .core import (
    Behavior,
    Context,
    Distribution,
    Observable,
    Scenario,
    format_outcome_key,
    format_rational,
    validate_behavior,
)
from .errors import FormatError
from .transforms import (
    CoarseGrainSpec,
    ConsistifiedTag,
    ConsistifySpec,
    DeconsistifySpec,
    NestSpec,
    PostProcessSpec,
    TransformSpec,
)

logger = logging.getLogger(__name__)

RATIONAL_PATTERN = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def parse_rational(text: Union[str, int]) -> Fraction:
    """Parse "num/den" or an integer string exactly."""
    if isinstance(text, bool):
        raise FormatError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not RATIONAL_PATTERN.match(text):
        raise FormatError(f"not a rational: {text!r}")
    try:
        return Fraction(text.replace(" ", ""))
    except ZeroDivisionError:
        raise FormatError(f"zero denominator: {text!r}")


def parse_outcome_key(key: str) -> tuple:
    """Inverse of format_outcome_key; "" is the nullary tuple."""
    return () if key == "" else tuple(key.split(","))


def content_hash(data: bytes) -> str:
    """SHA-256 of file content, embedded in every JSON output."""
    return hashlib.sha256(data).hexdigest()


# =============================================================================
# Behavior file
# =============================================================================

class ObservableModel(BaseModel):
    """An observable and its ordered outcome labels."""
    name: str
    outcomes: List[Union[str, int]] = Field(min_length=1)

    @field_validator("outcomes")
    @classmethod
    def labels_are_strings(cls, v):
        labels = [str(u) for u in v]
        for u in labels:
            if "," in u:
                raise ValueError(f"outcome label {u!r} contains a comma")
        return labels


class ContextShapeModel(BaseModel):
    name: str
    observables: List[str]


class ContextModel(ContextShapeModel):
    """A context with its distribution keyed by comma-joined outcomes."""
    distribution: Dict[str, Union[str, int]] = {}


class IncidenceTagModel(BaseModel):
    name: str
    observable: str
    context: str


class ContextTagModel(BaseModel):
    name: str
    kind: Literal["row", "col"]
    source: str


class SourceScenarioModel(BaseModel):
    observables: List[ObservableModel]
    contexts: List[ContextShapeModel]


class ProvenanceModel(BaseModel):
    """Consistification provenance: enough to invert the map from the file alone."""
    criterion: str
    observables: List[IncidenceTagModel]
    contexts: List[ContextTagModel]
    source: SourceScenarioModel


class BehaviorModel(BaseModel):
    """A behavior file."""
    observables: List[ObservableModel]
    contexts: List[ContextModel]
    provenance: Optional[ProvenanceModel] = None


def _scenario_from(observables: List[ObservableModel], contexts: List[ContextShapeModel]) -> Scenario:
    return Scenario(
        tuple(Observable(o.name, tuple(o.outcomes)) for o in observables),
        tuple(Context(c.name, tuple(c.observables)) for c in contexts),
    )


def _scenario_to(scenario: Scenario) -> SourceScenarioModel:
    return SourceScenarioModel(
        observables=[ObservableModel(name=q.name, outcomes=list(q.outcomes)) for q in scenario.observables],
        contexts=[ContextShapeModel(name=c.name, observables=list(c.observables)) for c in scenario.contexts],
    )


def behavior_from_model(model: BehaviorModel, validate: bool = True) -> Behavior:
    """Build a Behavior; with validate, reject any invariant violation."""
    scenario = _scenario_from(model.observables, model.contexts)
    distributions = {}
    for c in model.contexts:
        weights = {}
        for key, value in c.distribution.items():
            weights[parse_outcome_key(key)] = parse_rational(value)
        distributions[c.name] = Distribution(scenario.context_variables(c.name), weights)

    provenance = None
    if model.provenance is not None:
        p = model.provenance
        provenance = ConsistifiedTag(
            criterion=p.criterion,
            observables=tuple((t.name, t.observable, t.context) for t in p.observables),
            contexts=tuple((t.name, t.kind, t.source) for t in p.contexts),
            source=_scenario_from(p.source.observables, p.source.contexts),
        )

    behavior = Behavior(scenario, distributions, provenance=provenance)
    if validate:
        problems = validate_behavior(behavior)
        if problems:
            raise FormatError("invalid behavior: " + "; ".join(problems))
    return behavior


def behavior_to_model(b: Behavior) -> BehaviorModel:
    contexts = []
    for c in b.scenario.contexts:
        d = b.distributions.get(c.name)
        weights = (
            {format_outcome_key(k): format_rational(v) for k, v in d.sorted_items()} if d else {}
        )
        contexts.append(ContextModel(name=c.name, observables=list(c.observables), distribution=weights))

    provenance = None
    tag = b.provenance
    if isinstance(tag, ConsistifiedTag):
        provenance = ProvenanceModel(
            criterion=tag.criterion,
            observables=[IncidenceTagModel(name=n, observable=q, context=c) for n, q, c in tag.observables],
            contexts=[ContextTagModel(name=n, kind=k, source=s) for n, k, s in tag.contexts],
            source=_scenario_to(tag.source),
        )
    return BehaviorModel(
        observables=[ObservableModel(name=q.name, outcomes=list(q.outcomes)) for q in b.scenario.observables],
        contexts=contexts,
        provenance=provenance,
    )


def behavior_to_json(b: Behavior) -> dict:
    return behavior_to_model(b).model_dump(exclude_none=True)


def behavior_from_json(data: dict, validate: bool = True) -> Behavior:
    try:
        model = BehaviorModel.model_validate(data)
    except ValidationError as e:
        raise FormatError(f"malformed behavior: {e}")
    return behavior_from_model(model, validate=validate)


def read_json(path: Union[str, Path]) -> Tuple[dict, str]:
    """Load a JSON file, returning (document, content hash)."""
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}")
    try:
        data = json.loads(raw)
    except ValueError as e:
        raise FormatError(f"{path} is not valid JSON: {e}")
    return data, content_hash(raw)


def load_behavior(path: Union[str, Path], validate: bool = True) -> Tuple[Behavior, str]:
    """Read a behavior file; returns (behavior, content hash)."""
    data, digest = read_json(path)
    behavior = behavior_from_json(data, validate=validate)
    logger.debug(f"Loaded behavior from {path} ({len(behavior.scenario.contexts)} contexts)")
    return behavior, digest


def dump_json(data: dict) -> str:
    """The one JSON rendering used for every output, so outputs are byte-stable."""
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def dump_behavior(b: Behavior, path: Union[str, Path]) -> str:
    """Write a behavior file; returns the content hash written."""
    text = dump_json(behavior_to_json(b))
    Path(path).write_text(text, encoding="utf-8")
    return content_hash(text.encode("utf-8"))


# =============================================================================
# Transform specs
# =============================================================================

class NestSpecModel(BaseModel):
    """Keep-lists (observables/contexts/incidences) or drop-lists; omitted = keep all."""
    kind: Literal["nest"]
    observables: Optional[List[str]] = None
    contexts: Optional[List[str]] = None
    incidences: Optional[List[Tuple[str, str]]] = None
    drop_observables: List[str] = []
    drop_contexts: List[str] = []
    drop_incidences: List[Tuple[str, str]] = []


class CoarseGrainSpecModel(BaseModel):
    """Explicit outcome maps and/or merge groups per observable."""
    kind: Literal["coarse_grain"]
    maps: Dict[str, Dict[str, str]] = {}
    merges: Dict[str, List[List[str]]] = {}


class PostProcessSpecModel(BaseModel):
    kind: Literal["post_process"]
    sources: List[str]
    name: str
    function: Optional[str] = None
    table: Optional[Dict[str, str]] = None
    outcomes: Optional[List[str]] = None

    @field_validator("function")
    @classmethod
    def function_is_named(cls, v):
        if v is not None and v not in POST_PROCESS_FUNCTIONS:
            raise ValueError(f"unknown post-processing function {v!r}; known: {POST_PROCESS_FUNCTIONS}")
        return v


class ConsistifySpecModel(BaseModel):
    kind: Literal["consistify"]
    criterion: str = "multimaximal"


class DeconsistifySpecModel(BaseModel):
    kind: Literal["deconsistify"]


TransformSpecModel = Annotated[
    Union[
        NestSpecModel,
        CoarseGrainSpecModel,
        PostProcessSpecModel,
        ConsistifySpecModel,
        DeconsistifySpecModel,
    ],
    Field(discriminator="kind"),
]

_spec_adapter = TypeAdapter(TransformSpecModel)


def parse_spec_model(data: dict):
    try:
        return _spec_adapter.validate_python(data)
    except ValidationError as e:
        raise FormatError(f"malformed transform spec: {e}")


def spec_from_model(model, scenario: Scenario) -> TransformSpec:
    """Resolve a spec model against the scenario it will be applied to."""
    if isinstance(model, NestSpecModel):
        observables = set(model.observables if model.observables is not None else scenario.observable_names)
        contexts = set(model.contexts if model.contexts is not None else scenario.context_names)
        observables -= set(model.drop_observables)
        contexts -= set(model.drop_contexts)
        incidences = None
        if model.incidences is not None or model.drop_incidences:
            base = (
                {tuple(i) for i in model.incidences}
                if model.incidences is not None
                else {(q, c) for q, c in scenario.incidences() if q in observables and c in contexts}
            )
            incidences = frozenset(base - {tuple(i) for i in model.drop_incidences})
        return NestSpec(frozenset(observables), frozenset(contexts), incidences)

    if isinstance(model, CoarseGrainSpecModel):
        maps = {q: dict(m) for q, m in model.maps.items()}
        if model.merges:
            merged = CoarseGrainSpec.from_merges(scenario, model.merges).maps
            for q, mapping in merged.items():
                if q in maps:
                    raise FormatError(f"coarse-graining gives both a map and merges for {q}")
                maps[q] = dict(mapping)
        return CoarseGrainSpec(maps)

    if isinstance(model, PostProcessSpecModel):
        table = None
        if model.table is not None:
            table = {parse_outcome_key(k): v for k, v in model.table.items()}
        return PostProcessSpec(
            sources=tuple(model.sources),
            name=model.name,
            function=model.function,
            table=table,
            outcomes=tuple(model.outcomes) if model.outcomes is not None else None,
        )

    if isinstance(model, ConsistifySpecModel):
        return ConsistifySpec(model.criterion)
    return DeconsistifySpec()


def spec_from_json(data: dict, scenario: Scenario) -> TransformSpec:
    return spec_from_model(parse_spec_model(data), scenario)


def spec_to_json(spec: TransformSpec, scenario: Optional[Scenario] = None) -> dict:
    """Keep-form JSON of a resolved spec, in scenario order when given."""
    if isinstance(spec, NestSpec):
        data: dict = {"kind": "nest"}
        order_q = scenario.observable_names if scenario else None
        order_c = scenario.context_names if scenario else None
        order_i = scenario.incidences() if scenario else None

        def ordered(values, order):
            if order is None:
                return sorted(values)
            return [v for v in order if v in values]

        if spec.observables is not None:
            data["observables"] = ordered(spec.observables, order_q)
        if spec.contexts is not None:
            data["contexts"] = ordered(spec.contexts, order_c)
        if spec.incidences is not None:
            data["incidences"] = [list(i) for i in ordered(spec.incidences, order_i)]
        return data
    if isinstance(spec, CoarseGrainSpec):
        return {"kind": "coarse_grain", "maps": {q: {str(u): str(v) for u, v in m.items()} for q, m in spec.maps.items()}}
    if isinstance(spec, PostProcessSpec):
        data = {"kind": "post_process", "sources": list(spec.sources), "name": spec.name}
        if spec.function is not None:
            data["function"] = spec.function
        if spec.table is not None:
            data["table"] = {format_outcome_key(k): str(v) for k, v in spec.table.items()}
        if spec.outcomes is not None:
            data["outcomes"] = list(spec.outcomes)
        return data
    if isinstance(spec, ConsistifySpec):
        return {"kind": "consistify", "criterion": spec.criterion}
    return {"kind": "deconsistify"}


# =============================================================================
# Search config
# =============================================================================

class ShapeModel(BaseModel):
    observables: List[ObservableModel]
    contexts: List[ContextShapeModel]


class SearchConfigModel(BaseModel):
    """A search config file. shape is a preset name or an explicit scenario."""
    shape: Union[str, ShapeModel] = "cycle4"
    theory: Literal["ks", "cbd2", "strict"] = "cbd2"
    families: List[Literal["nestedness", "coarse-graining", "post-processing"]] = [
        "nestedness",
        "coarse-graining",
        "post-processing",
    ]
    conditioning: Literal["any", "disturbing", "nondisturbing"] = "disturbing"
    denominator: Optional[int] = Field(default=None, ge=1)
    budget: int = Field(default=100, ge=1)
    seed: int = 0
    perturb: bool = True
    workers: Optional[int] = Field(default=None, ge=1)


def scenario_from_shape(shape: ShapeModel) -> Scenario:
    return _scenario_from(shape.observables, shape.contexts)
