import json

from django.conf import settings

from MarkedRisk.utils.output_utils import read_json

JSON_TYPES = {
    'string': str,
    'number': (int, float),
    'boolean': bool,
    'object': dict,
    'array': list,
    'null': type(None),
}


def headline(stdout: str) -> dict:
    """The JSON line a command prints last."""
    return json.loads(stdout.strip().splitlines()[-1])


def summary_schema() -> dict:
    return read_json(settings.BASE_DIR / 'schemas' / 'summary.schema.json')


def _matches(value, spec: dict) -> bool:
    if 'oneOf' in spec:
        return sum(_matches(value, option) for option in spec['oneOf']) == 1
    declared = spec['type'] if isinstance(spec['type'], list) else [spec['type']]
    for name in declared:
        # bool is an int subclass but never a JSON number
        if name == 'number' and isinstance(value, bool):
            continue
        if not isinstance(value, JSON_TYPES[name]):
            continue
        if name == 'array':
            if not spec.get('minItems', 0) <= len(value) <= spec.get('maxItems', len(value)):
                continue
            if 'items' in spec and not all(_matches(item, spec['items']) for item in value):
                continue
        return True
    return False


def schema_violations(summary: dict) -> list[str]:
    """Keys of a summary.json that break the published schema, with the reason."""
    schema = summary_schema()
    problems = [f'{key}: missing' for key in schema['required'] if key not in summary]
    for key, value in summary.items():
        spec = schema['properties'].get(key)
        if spec is None:
            problems.append(f'{key}: not declared')
        elif not _matches(value, spec):
            problems.append(f'{key}: {value!r} does not match {spec}')
    return problems
