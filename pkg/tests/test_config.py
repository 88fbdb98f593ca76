import pytest

from netform.experiments.config import ConfigError, ExperimentConfig, PolicySpec, load_config, parse_config

GOOD = """\
kind = "p2"
n = 20
T = 10
seed = 3

[policy]
kind = "mnl"
theta = [0.0, 0.0, 3.0]

[grid]
delta = [1, 2]
"""


def test_parse_good_config():
    cfg = parse_config(GOOD)
    assert cfg.kind == "p2" and cfg.n == 20 and cfg.policy.theta == (0.0, 0.0, 3.0)
    pts = cfg.expand()
    assert [p.delta for p in pts] == [1, 2] and all(p.grid == {} for p in pts)


def test_fingerprint_stable_and_sensitive():
    a = parse_config(GOOD)
    assert a.fingerprint() == parse_config(GOOD).fingerprint()
    assert a.fingerprint() != a.replace(seed=4).fingerprint()
    assert a.replace(**{"policy.temperature": 0.2}).policy.temperature == 0.2


@pytest.mark.parametrize("text,field,line", [
    ('kind = "p3"\nn = "ten"\n', "n", 2),
    ('kind = "p3"\nbogus = 1\n', "bogus", 2),
    ('kind = "p3"\n\n[policy]\nkind = "oracle"\n', "policy.kind", 4),
    ('kind = "p3"\n[policy]\ntheta = [1.0]\n', "policy.theta", 3),
    ('kind = "p9"\n', "kind", 1),
    ('kind = "p5"\nk = 4\nsizes = [3, 10]\n', "sizes", 3),
    ('kind = "p2"\nn = 7\n', "n", 2),
    ('kind = "p3"\n[policy]\nkind = "llm"\nmodel = "m"\n', "policy.endpoint", None),
])
def test_config_errors_name_field_and_line(text, field, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.field == field
    assert info.value.line == line


def test_top_level_key_not_confused_with_table_key():
    text = 'kind = "p3"\n[policy]\nseed = 1\n\n'
    text = text.replace('kind = "p3"\n', 'kind = "p3"\nseed = -1\n')
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.field == "seed" and info.value.line == 2


def test_syntax_error_has_line():
    with pytest.raises(ConfigError) as info:
        parse_config('kind = "p3"\nn = = 3\n')
    assert info.value.line == 2


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.toml")


def test_defaults():
    cfg = ExperimentConfig(kind="p1")
    assert cfg.policy == PolicySpec()
    assert cfg.to_dict()["grid"] == {}
