# Configuration file for the Sphinx documentation builder.
#
# This file only contains a selection of the most common options. For a full
# list see the documentation:
# http://www.sphinx-doc.org/en/master/config

import datetime
import os
import sys

sys.path.insert(0, os.path.abspath("../src"))

import risa  # noqa: E402 isort:skip

# -- General configuration ---------------------------------------------------

extensions = ["sphinx.ext.autodoc", "sphinx.ext.viewcode"]
templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

# General information about the project.
project = "risa"
copyright = "{year}, RISA developers".format(year=datetime.date.today().year)
author = "RISA developers"

# The short X.Y version and the full version, including alpha/beta/rc tags.
release = version = risa.__version__

language = None
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"
todo_include_todos = False

# -- Options for HTML output -------------------------------------------------

html_theme = "alabaster"
html_static_path = []
htmlhelp_basename = "risadoc"

# -- Options for manual page output ------------------------------------------

man_pages = [(master_doc, "risa", "risa Documentation", [author], 1)]
