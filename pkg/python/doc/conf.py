# -*- coding: utf-8 -*-
#
# libotda documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

# -- General configuration ------------------------------------------------

autoclass_content = "both"
autosummary_generate = True
autosummary_imported_members = True
numpydoc_show_class_members = False
autodoc_typehints = "description"
autodoc_typehints_format = "short"
python_use_unqualified_type_names = True
autodoc_inherit_docstrings = False
add_module_names = True

intersphinx_mapping = {
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
    "pandas": ("https://pandas.pydata.org/docs/", None),
}

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.viewcode",
    "sphinx.ext.githubpages",
    "sphinx.ext.napoleon",
    "sphinxarg.ext",
    "sphinx.ext.intersphinx",
    "numpydoc",
    "sphinx_copybutton",
]

# Napoleon settings
napoleon_google_docstring = False
napoleon_numpy_docstring = True

source_suffix = ".rst"
master_doc = "index"

project = "libotda"
copyright = "2024, libotda developers"
author = "libotda developers"

# The short X.Y version.
version = "1.0"
# The full version, including alpha/beta/rc tags.
release = "1.0a1"

language = "en"
exclude_patterns = []
pygments_style = "sphinx"
todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = "pydata_sphinx_theme"
html_theme_options = {
    "logo": {
        "text": "libotda",
    }
}
htmlhelp_basename = "libotdadoc"

# -- Options for manual page output ---------------------------------------

man_pages = [
    (
        master_doc,
        "libotda",
        "libotda Documentation",
        [author],
        1,
    )
]
