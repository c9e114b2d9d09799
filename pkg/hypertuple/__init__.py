from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("hypertuple")
except PackageNotFoundError:
    __version__ = "unknown"
