import io
import logging
import os

import pytest

from connectors import AppConfigClient, DocumentClient, dumps
from constants import CENSUS_BUDGET, CENSUS_PROGRESS, CENSUS_SHARDS, LOG_LEVEL, TANGENT_MAX_DEGREE
from dependencies import get_config
from nchilbert.exceptions import ConfigurationError, DocumentError
from telemetry import Telemetry


@pytest.fixture
def settings(tmp_path):
    def write(text):
        path = tmp_path / "settings.env"
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for key in (CENSUS_BUDGET, CENSUS_SHARDS, CENSUS_PROGRESS):
        monkeypatch.delenv(key, raising=False)


def test_defaults():
    config = AppConfigClient()
    assert config.get(CENSUS_SHARDS, type=int) == 1
    assert config.get(CENSUS_PROGRESS, type=bool) is False
    assert config.get(LOG_LEVEL) == "WARNING"


def test_precedence(settings, monkeypatch):
    path = settings("CENSUS_SHARDS=4\nCENSUS_BUDGET=50\n")
    assert AppConfigClient(path).get(CENSUS_SHARDS, type=int) == 4
    assert AppConfigClient(path, {CENSUS_SHARDS: "6"}).get(CENSUS_SHARDS, type=int) == 6

    monkeypatch.setenv(CENSUS_BUDGET, "500")
    assert AppConfigClient(path).get(CENSUS_BUDGET, type=int) == 500
    assert AppConfigClient(path, {CENSUS_BUDGET: "7"}).get(CENSUS_BUDGET, type=int) == 7


def test_environment_is_whitelisted(settings, monkeypatch):
    monkeypatch.setenv(CENSUS_SHARDS, "9")
    assert AppConfigClient().get(CENSUS_SHARDS, type=int) == 1
    assert AppConfigClient(settings("CENSUS_SHARDS=2\n")).get(CENSUS_SHARDS, type=int) == 2


def test_settings_file_does_not_touch_the_environment(settings):
    AppConfigClient(settings("CENSUS_SHARDS=3\n"))
    assert CENSUS_SHARDS not in os.environ


def test_none_overrides_are_ignored():
    assert AppConfigClient(overrides={CENSUS_SHARDS: None}).get(CENSUS_SHARDS, type=int) == 1


@pytest.mark.parametrize("text,expected", [("yes", True), ("1", True), (" TRUE ", True), ("off", False), ("0", False)])
def test_boolean_values(settings, text, expected):
    config = AppConfigClient(settings(f"CENSUS_PROGRESS={text}\n"))
    assert config.get(CENSUS_PROGRESS, type=bool) is expected


def test_conversion_errors(settings):
    config = AppConfigClient(settings("CENSUS_SHARDS=many\n"))
    with pytest.raises(ConfigurationError):
        config.get(CENSUS_SHARDS, type=int)


def test_missing_values():
    config = AppConfigClient()
    with pytest.raises(ConfigurationError):
        config.get(TANGENT_MAX_DEGREE)
    assert config.get_value(TANGENT_MAX_DEGREE, allow_none=True, type=int) is None
    assert config.get(TANGENT_MAX_DEGREE, default=5) == 5
    with pytest.raises(ConfigurationError):
        config.get_value(None)


def test_missing_settings_file(tmp_path):
    missing = str(tmp_path / "absent.env")
    with pytest.raises(ConfigurationError) as raised:
        AppConfigClient(missing)
    assert raised.value.path == missing


def test_get_config_caches_until_refreshed():
    first = get_config("refresh", overrides={CENSUS_SHARDS: "5"})
    assert get_config() is first
    assert get_config().get(CENSUS_SHARDS, type=int) == 5
    second = get_config("refresh")
    assert second is not first
    assert second.get(CENSUS_SHARDS, type=int) == 1


@pytest.mark.parametrize(
    "name,level",
    [
        ("Debug", logging.DEBUG),
        ("Information", logging.INFO),
        ("info", logging.INFO),
        ("WARNING", logging.WARNING),
        ("Critical", logging.CRITICAL),
        ("bogus", logging.NOTSET),
        (None, logging.NOTSET),
    ],
)
def test_translate_log_level(name, level):
    assert Telemetry.translate_log_level(name) == level


def test_configure_logging_sets_the_package_level():
    Telemetry.configure_logging(AppConfigClient(overrides={LOG_LEVEL: "Debug"}))
    assert logging.getLogger("nc_hilbert").level == logging.DEBUG
    Telemetry.configure_logging(AppConfigClient())
    assert logging.getLogger("nc_hilbert").level == logging.WARNING


def test_documents(tmp_path):
    path = tmp_path / "doc.json"
    path.write_text('{"b": [1, 2], "a": "1/2"}', encoding="utf-8")
    assert DocumentClient(str(path)).load() == {"a": "1/2", "b": [1, 2]}
    assert dumps({"z": 1, "y": {"d": 0, "c": 1}}) == '{"y":{"c":1,"d":0},"z":1}'


def test_document_errors(tmp_path):
    missing = str(tmp_path / "absent.json")
    with pytest.raises(DocumentError) as raised:
        DocumentClient(missing).load()
    assert raised.value.path == missing

    broken = tmp_path / "broken.json"
    broken.write_text("{\"m\": 2,", encoding="utf-8")
    with pytest.raises(DocumentError, match="malformed JSON"):
        DocumentClient(str(broken)).load()


def test_undecodable_documents(tmp_path, monkeypatch):
    binary = tmp_path / "binary.json"
    binary.write_bytes(b'{"m": 2, "field": "\xff"}')
    with pytest.raises(DocumentError, match="not valid UTF-8") as raised:
        DocumentClient(str(binary)).load()
    assert raised.value.path == str(binary)

    monkeypatch.setattr("sys.stdin", io.TextIOWrapper(io.BytesIO(b"\xff\xfe"), encoding="utf-8"))
    with pytest.raises(DocumentError) as raised:
        DocumentClient("-").load()
    assert raised.value.path == "-"
