import pytest

from dual_sonc.errors import InstanceError
from dual_sonc.example_instances.loader import InstanceLoader
from dual_sonc.support import Kind


def test_instance_loader():
    il = InstanceLoader()
    instances = il.fetch_instances()

    assert 'motzkin' in instances
    assert 'references' not in instances
    assert instances['motzkin'].kind is Kind.POLYNOMIAL
    assert instances['kirkman'].d == 23


def test_instance_paths_are_sorted():
    paths = InstanceLoader().instance_paths()
    assert [p.name for p in paths] == sorted(p.name for p in paths)


def test_references():
    references = InstanceLoader().references()
    assert references['motzkin'] == 26.0
    assert references['paired_negatives_c3'] is None


def test_custom_directory(tmp_path):
    (tmp_path / 'line.json').write_text(
        '{"n": 1, "kind": "polynomial", "terms": [{"exp": [2], "coef": 1}]}'
    )
    il = InstanceLoader(tmp_path)
    assert list(il.fetch_instances()) == ['line']
    assert il.references() == {}


def test_malformed_instance(tmp_path):
    (tmp_path / 'broken.json').write_text('{"n": 1,')
    with pytest.raises(InstanceError):
        InstanceLoader(tmp_path).fetch('broken')
