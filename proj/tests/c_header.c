// Copyright 2026 The TPGN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* The public header must compile as plain C. */

#include "tpgn/tpgn.h"

#include <stdio.h>
#include <string.h>

int main(void) {
  tpgn_config* cfg = NULL;
  tpgn_bench_scenario s;
  char hash[41];
  if (tpgn_config_create(&cfg) != TPGN_OK) return 1;
  if (tpgn_config_set(cfg, "lh", "96") != TPGN_OK) return 1;
  if (tpgn_config_set(cfg, "lh", "x") != TPGN_ERR_CONFIG) return 1;
  if (strlen(tpgn_last_error()) == 0) return 1;
  if (tpgn_config_hash(cfg, hash) != TPGN_OK || strlen(hash) != 40) return 1;
  tpgn_config_destroy(cfg);
  tpgn_bench_scenario_default(&s);
  if (s.repeats < 3) return 1;
  printf("tpgn %s\n", tpgn_version());
  return 0;
}
