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

import os
import sys

sys.path.insert(0, os.path.abspath('../..'))
# -- General configuration ----------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinxcontrib.apidoc',
]

# The suffix of source filenames.
source_suffix = '.rst'

# The master toctree document.
master_doc = 'index'

# General information about the project.
project = 'cbf-servo-lib'
copyright = '2026, cbf-servo-lib Developers'

apidoc_output_dir = 'reference/modules'
apidoc_module_dir = '../../cbf_servo_lib'
apidoc_excluded_paths = [
  'tests',
  'hacking',
  'i18n.py'
]

# If true, '()' will be appended to :func: etc. cross-reference text.
add_function_parentheses = True

# If true, the current module name will be prepended to all description
# unit titles (such as .. function::).
add_module_names = True

# The name of the Pygments (syntax highlighting) style to use.
pygments_style = 'sphinx'

# -- Options for HTML output --------------------------------------------------

html_theme = 'alabaster'

# Output file base name for HTML help builder.
htmlhelp_basename = 'cbf-servo-libdoc'

# -- Options for LaTeX output -------------------------------------------------

latex_elements = {
    # openany: Skip blank pages in generated PDFs
    'extraclassoptions': 'openany,oneside',
    'makeindex': '',
    'printindex': '',
}

# Some distros are missing xindy
latex_use_xindy = False

latex_documents = [(
    'index',
    'doc-cbf-servo-lib.tex',
    'cbf-servo-lib Documentation',
    'cbf-servo-lib Developers',
    'manual'
)]

# If false, no module index is generated.
latex_domain_indices = False
