/* Exercises the shared library through its C header only. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "socmine/socmine.h"

static int failures = 0;

#define CHECK(cond)                                                                                                    \
  do {                                                                                                                 \
    if (!(cond)) {                                                                                                     \
      fprintf(stderr, "%s:%d: CHECK(%s) failed: %s\n", __FILE__, __LINE__, #cond, socmine_last_error());             \
      ++failures;                                                                                                      \
    }                                                                                                                  \
  } while (0)

static void write_file(const char *path, const char *text) {
  FILE *f = fopen(path, "wb");
  fputs(text, f);
  fclose(f);
}

int main(int argc, char **argv) {
  const char *tmp = argc > 1 ? argv[1] : ".";
  char log_path[1024], out_dir[1024], config[4096], net_path[1024];
  snprintf(log_path, sizeof log_path, "%s/capi_two.csv", tmp);
  snprintf(out_dir, sizeof out_dir, "%s/capi_out", tmp);
  snprintf(net_path, sizeof net_path, "%s/capi_out/net.json", tmp);
  write_file(log_path, "trace_id,activity,timestamp\n"
                       "1,A,2024-01-01T00:00:00Z\n1,B,2024-01-01T00:00:05Z\n1,C,2024-01-01T00:00:07Z\n"
                       "2,A,2024-01-01T01:00:00Z\n2,C,2024-01-01T01:00:03Z\n2,B,2024-01-01T01:00:10Z\n"
                       "3,A,not-a-time\n");

  CHECK(strlen(socmine_version()) > 0);

  socmine_log *log = NULL;
  size_t rejected = 0;
  CHECK(socmine_log_read(log_path, NULL, &log, &rejected) == SOCMINE_OK);
  CHECK(rejected == 1);
  CHECK(socmine_log_trace_count(log) == 2);
  CHECK(socmine_log_preprocess(log, 2, 1) == SOCMINE_OK);
  CHECK(socmine_log_event_count(log) == 2);
  CHECK(socmine_log_preprocess(log, 0, 1) == SOCMINE_ERR_ARGUMENT);
  CHECK(strlen(socmine_last_error()) > 0);
  socmine_log_free(log);

  CHECK(socmine_log_read(log_path, NULL, &log, NULL) == SOCMINE_OK);
  socmine_net *net = NULL;
  char *tree = NULL;
  CHECK(socmine_discover(log, 0.2, &net, &tree) == SOCMINE_OK);
  CHECK(tree && strcmp(tree, "->(A, /\\(B, C))") == 0);
  socmine_string_free(tree);

  char *dot = NULL;
  CHECK(socmine_net_to_dot(net, &dot) == SOCMINE_OK);
  CHECK(dot && strncmp(dot, "digraph net {", 13) == 0);
  socmine_string_free(dot);

  socmine_fspn *fspn = NULL;
  CHECK(socmine_enrich(net, log, &fspn) == SOCMINE_OK);
  socmine_log *simulated = NULL;
  CHECK(socmine_simulate(fspn, 50, 1, 1000, &simulated) == SOCMINE_OK);
  CHECK(socmine_log_trace_count(simulated) == 50);
  CHECK(socmine_simulate(fspn, -1, 1, 1000, &simulated) == SOCMINE_ERR_ARGUMENT);
  socmine_log_free(simulated);
  socmine_fspn_free(fspn);
  socmine_net_free(net);
  socmine_log_free(log);

  CHECK(socmine_net_from_tree("->(A", &net) == SOCMINE_ERR_PARSE);
  CHECK(socmine_log_read("/nonexistent/x.csv", NULL, &log, NULL) == SOCMINE_ERR_IO);
  CHECK(strstr(socmine_last_error(), "/nonexistent/x.csv") != NULL);
  CHECK(socmine_log_read(log_path, "colour=red", &log, NULL) == SOCMINE_ERR_PARSE);
  CHECK(socmine_discover(NULL, 0.2, &net, NULL) == SOCMINE_ERR_ARGUMENT);

  char *reports = NULL;
  snprintf(config, sizeof config, "{\"inputs\":[\"%s\"],\"out\":\"%s\"}", log_path, out_dir);
  CHECK(socmine_run_pipeline(config, &reports) == SOCMINE_OK);
  CHECK(reports && strstr(reports, "\"nodes\": 6") != NULL);
  socmine_string_free(reports);

  char *cmp = NULL;
  CHECK(socmine_compare_dirs(out_dir, out_dir, &cmp) == SOCMINE_OK);
  CHECK(cmp && strstr(cmp, "\"density_ratio\": 1.0") != NULL);
  socmine_string_free(cmp);

  CHECK(socmine_export_dot_file(net_path, 1, &dot) == SOCMINE_OK);
  CHECK(dot && strstr(dot, "fillcolor=black") == NULL);
  socmine_string_free(dot);

  CHECK(socmine_run_pipeline("{not json", &reports) == SOCMINE_ERR_PIPELINE);
  CHECK(strncmp(socmine_last_error(), "config", 6) == 0);
  snprintf(config, sizeof config, "{\"inputs\":[\"%s/missing.csv\"],\"out\":\"%s\"}", tmp, out_dir);
  CHECK(socmine_run_pipeline(config, NULL) == SOCMINE_ERR_PIPELINE);
  CHECK(strstr(socmine_last_error(), "missing.csv") != NULL);

  if (failures)
    fprintf(stderr, "%d check(s) failed\n", failures);
  else
    printf("all C interface checks passed\n");
  return failures ? 1 : 0;
}
