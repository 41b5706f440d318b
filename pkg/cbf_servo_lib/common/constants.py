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

# Numerical tolerances
TOL_HURWITZ = 1e-9
TOL_RANK = 1e-10
TOL_ZERO = 1e-9
TOL_POLE = 1e-9
TOL_SYMMETRY = 1e-10
HPI_COND_MAX = 1e12
DISK_INVERSE_COND_MAX = 1e12
CARE_TOL = 1e-9
CARE_MAX_ITER = 60
QP_FEASIBILITY_TOL = 1e-9
BISECTION_REL_TOL = 1e-6
BISECTION_MAX_ITER = 200
ENVELOPE_MIN_POINTS = 200
ENVELOPE_HORIZON = 10.0
ENVELOPE_SAFETY = 1.1

# Frequency grid defaults, rad/s
GRID_COUNT = 2000
GRID_LOW = 1e-3
GRID_HIGH = 1e4

# Simulation defaults, s
DEFAULT_DT = 1e-3
DEFAULT_T_FINAL = 20.0

# Gain provenance
PROVENANCE_GIVEN = 'given'
PROVENANCE_LQR = 'lqr-designed'
PROVENANCE_PLACED = 'pole-placed'
PROVENANCES = (PROVENANCE_GIVEN, PROVENANCE_LQR, PROVENANCE_PLACED)

# Observer modes accepted in scenario files
OBSERVER_GIVEN = 'given'
OBSERVER_LQR = 'lqr'
OBSERVER_PLACE = 'place'
OBSERVER_STATE_FEEDBACK = 'state_feedback'
OBSERVER_MODES = (OBSERVER_GIVEN, OBSERVER_LQR, OBSERVER_PLACE,
                  OBSERVER_STATE_FEEDBACK)
BASELINE_MODES = (OBSERVER_GIVEN, OBSERVER_LQR)

# Disturbance profiles
DIST_NONE = 'none'
DIST_STEP = 'step'
DIST_ONE_MINUS_COS = 'one_minus_cos'
DIST_FILTERED_NOISE = 'filtered_noise'
DIST_CSV = 'csv'
DISTURBANCE_KINDS = (DIST_NONE, DIST_STEP, DIST_ONE_MINUS_COS,
                     DIST_FILTERED_NOISE, DIST_CSV)
DISTURBANCE_CSV_HEADER = ('time_s', 'value')

# 64-bit linear congruential generator (Knuth MMIX constants)
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
LCG_MODULUS = 2 ** 64

# Units
UNIT_SI = 'si'
UNIT_DEG = 'deg'
UNITS = (UNIT_SI, UNIT_DEG)

# Sweep modes
SWEEP_DIAGONAL = 'diagonal'
SWEEP_GRID = 'grid'
SWEEP_MODES = (SWEEP_DIAGONAL, SWEEP_GRID)

# Loop break points for the margin analysis
BREAK_OBSERVER = 'observer'
BREAK_STATE_FEEDBACK = 'state_feedback'
BREAK_POINTS = (BREAK_OBSERVER, BREAK_STATE_FEEDBACK)

# Why a channel has no phase margin
NOTE_BELOW_UNITY = 'no gain crossover, loop gain below 0 dB on the grid'
NOTE_ABOVE_UNITY = 'no gain crossover, loop gain above 0 dB on the grid'

# CLI
PROJECT = 'cbf-servo'
CHECK = 'check'
DESIGN = 'design'
SIMULATE = 'simulate'
MARGINS = 'margins'
SWEEP = 'sweep'
BOUND = 'bound'
SUBCOMMANDS = (CHECK, DESIGN, SIMULATE, MARGINS, SWEEP, BOUND)
DEFAULT_OUT_DIR = 'cbf-servo-output'

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_CHECK_FAILED = 2
EXIT_NUMERICAL = 3

# Output files
MANIFEST_FILE = 'manifest.json'
MANIFEST_PREFIX = '# manifest: '
CHECK_FILE = 'check.json'
DESIGN_FILE = 'design.csv'
TRAJECTORY_FILE = 'trajectory.csv'
VIOLATIONS_FILE = 'violations.csv'
MARGINS_FILE = 'margins.csv'
BODE_FILE = 'bode.csv'
NYQUIST_FILE = 'nyquist.csv'
SWEEP_FILE = 'sweep.csv'
BOUND_FILE = 'bound.csv'
CSV_FLOAT_FORMAT = '%.17g'

DESIGN_COLUMNS = ('quantity', 'row', 'col', 'value')
VIOLATION_COLUMNS = ('constraint', 'max_below', 'max_above', 'max_violation',
                     'first_time', 'last_time', 'duration')
MARGIN_COLUMNS = ('delta', 'actuator', 'channel', 'gm_db', 'pm_deg',
                  'phase_crossover', 'gain_crossover', 'disk_alpha',
                  'disk_gm_low_db', 'disk_gm_high_db', 'disk_pm_deg', 'note')
BOUND_COLUMNS = ('constraint', 'alpha_star', 'lambda_max', 'rule_holds', 'k',
                 'e0_norm', 'h_min_0', 'h_max_0', 't_min', 't_max', 't_bound')
