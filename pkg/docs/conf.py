# Configuration file for the Sphinx documentation builder.
#
# This file only contains a selection of the most common options. For a full
# list see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import datetime

from packaging.version import Version

from hypertuple import __version__

# -- Project information -----------------------------------------------------

project = 'hypertuple'
author = 'hypertuple developers'
copyright = '{}, {}'.format(datetime.datetime.now().year, author)

release = __version__
hypertuple_version = Version(__version__) if __version__ != 'unknown' else None
is_release = hypertuple_version is not None and not (
    hypertuple_version.is_prerelease or hypertuple_version.is_devrelease)


# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.napoleon',
]

# List of patterns, relative to source directory, that match files and
# directories to ignore when looking for source files.
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

intersphinx_mapping = {
    "numpy": ("https://numpy.org/doc/stable", None),
    "scipy": ("https://docs.scipy.org/doc/scipy", None),
}

autodoc_member_order = 'bysource'

# -- Options for HTML output -------------------------------------------------

html_theme = "alabaster"
