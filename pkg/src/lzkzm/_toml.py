try:
    import tomllib as _toml
except ImportError:  # python < 3.11
    import tomli as _toml


def load_toml(path) -> dict:
    with open(path, "rb") as fh:
        return _toml.load(fh)


def loads_toml(text: str) -> dict:
    return _toml.loads(text)
