# Sphinx configuration for the ballbot-nav documentation.
# https://www.sphinx-doc.org/en/master/usage/configuration.html

project = "ballbot_nav"
copyright = "2026, The ballbot-nav developers"
author = "The ballbot-nav developers"

extensions = [
    "myst_nb",
    "autoapi.extension",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
]

# API pages from the source tree; the CLI module documents itself.
autoapi_dirs = ["../src"]
autoapi_options = [
    "members",
    "undoc-members",
    "show-inheritance",
    "show-module-summary",
    "imported-members",
]
napoleon_google_docstring = True
napoleon_numpy_docstring = False

# README code blocks train and simulate; never execute them while building.
nb_execution_mode = "off"
myst_enable_extensions = ["dollarmath"]

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

html_theme = "sphinx_rtd_theme"
