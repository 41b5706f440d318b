#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

import csv
import os

from oslo_log import log as logging
from oslo_serialization import jsonutils
from oslo_utils import fileutils

from cbf_servo_lib.common import constants
from cbf_servo_lib.common import data_models
from cbf_servo_lib import version

LOG = logging.getLogger(__name__)


def format_cell(value):
    """Render a CSV cell; floats keep 17 significant digits."""
    if value is None or value is data_models.Unset:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return constants.CSV_FLOAT_FORMAT % value
    return str(value)


class OutputWriter():
    """Writes the files of one run and the manifest describing them.

    :param out_dir: Output directory, created when missing.
    :param scenario_hash: Hash stamped into every file.
    :param subcommand: The subcommand that produced the files.
    """

    def __init__(self, out_dir, scenario_hash, subcommand):
        self.out_dir = out_dir
        self.scenario_hash = scenario_hash
        self.subcommand = subcommand
        self.files = []
        fileutils.ensure_tree(out_dir)

    def path(self, name):
        return os.path.join(self.out_dir, name)

    def write_csv(self, name, columns, rows):
        with open(self.path(name), 'w', newline='') as handle:
            handle.write('%s%s\n' % (constants.MANIFEST_PREFIX,
                                     self.scenario_hash))
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_cell(value) for value in row])
        self._written(name)

    def write_json(self, name, payload):
        with open(self.path(name), 'w') as handle:
            handle.write(jsonutils.dumps(payload, sort_keys=True, indent=2))
            handle.write('\n')
        self._written(name)

    def _written(self, name):
        LOG.info('Wrote %s', self.path(name))
        self.files.append(name)

    def write_manifest(self):
        manifest = data_models.RunManifest(
            tool_version=version.version_string_with_package(),
            scenario_hash=self.scenario_hash, subcommand=self.subcommand,
            files=list(self.files))
        self.write_json(constants.MANIFEST_FILE,
                        manifest.to_dict(recurse=True))
        return manifest
