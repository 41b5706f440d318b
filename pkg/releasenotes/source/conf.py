# -*- coding: utf-8 -*-
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
# implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# -- General configuration ------------------------------------------------

extensions = [
    'reno.sphinxext',
]

# The suffix of source filenames.
source_suffix = '.rst'

# The master toctree document.
master_doc = 'index'

# General information about the project.
project = 'cbf-servo-lib Release Notes'
copyright = '2026, cbf-servo-lib Developers'

# Release notes do not need a version number in the title.
release = ''
version = ''

# List of patterns, relative to source directory, that match files and
# directories to ignore when looking for source files.
exclude_patterns = []

# The name of the Pygments (syntax highlighting) style to use.
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'alabaster'

# Output file base name for HTML help builder.
htmlhelp_basename = 'cbf_servo_libReleaseNotesdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    ('index', 'cbf_servo_libReleaseNotes.tex',
     'cbf-servo-lib Release Notes Documentation',
     'cbf-servo-lib Developers', 'manual'),
]

# -- Options for Internationalization output ------------------------------
locale_dirs = ['locale/']
