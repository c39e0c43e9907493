/* C interface to the featgts library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every function returning fg_status leaves a message for fg_last_error()
 * when it fails. Strings returned through char** are heap allocated and
 * released with fg_string_free. */
#ifndef FEATGTS_H
#define FEATGTS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FG_API __declspec(dllexport)
#else
#define FG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as process exit codes of the command-line tool. */
typedef enum fg_status {
  FG_OK = 0,
  FG_ERR_PARSE = 64,
  FG_ERR_CONSISTENCY = 65,
  FG_ERR_INVALID_CONFIGURATION = 66,
  FG_ERR_RUNTIME = 70
} fg_status;

typedef struct fg_model fg_model;               /* feature model document */
typedef struct fg_gts fg_gts;                   /* a single system */
typedef struct fg_graph fg_graph;               /* an instance graph */
typedef struct fg_trajectories fg_trajectories; /* simulation runs */

FG_API const char* fg_version(void);

/* Message of the last failure on the calling thread, "" if none. */
FG_API const char* fg_last_error(void);

FG_API void fg_string_free(char* s);

/* Models. Feature lists are comma separated, e.g. "SIR,network". */

FG_API fg_status fg_model_parse(const char* text, size_t len, fg_model** out);
FG_API void fg_model_free(fg_model* m);
FG_API fg_status fg_model_print(const fg_model* m, char** out);

/* One valid configuration per line, features sorted and comma separated. */
FG_API fg_status fg_model_configurations(const fg_model* m, char** out);

FG_API fg_status fg_model_derive(const fg_model* m, const char* features, fg_gts** out);

/* Merges the variants of two feature sets over the variant of their
 * intersection. Both sets are closed upwards first. */
FG_API fg_status fg_model_merge(const fg_model* m, const char* left, const char* right, fg_gts** out);

/* Sets *conservative and a report such as
 * "NOT conservative: desert (deletes link, creates link)". */
FG_API fg_status fg_model_check_conservative(const fg_model* m, const char* base, const char* ext,
                                             int* conservative, char** report);

/* Systems. */

FG_API void fg_gts_free(fg_gts* g);
FG_API fg_status fg_gts_print(const fg_gts* g, char** out);
FG_API fg_status fg_gts_with_grid(fg_gts* g, int size);
/* rates: "name=value,name=value". */
FG_API fg_status fg_gts_with_rates(fg_gts* g, const char* rates);

/* Graphs. init: "N,k", "N,k,p" or "N,k,ring-d"; grid 0 keeps the model's. */

FG_API fg_status fg_gts_generate_init(const fg_gts* g, const char* init, int grid, uint64_t seed, fg_graph** out);
FG_API void fg_graph_free(fg_graph* g);
FG_API size_t fg_graph_node_count(const fg_graph* g);
FG_API size_t fg_graph_edge_count(const fg_graph* g);

/* Simulation. */

typedef struct fg_sim_options {
  double horizon;
  uint64_t max_events; /* 0: 1000000 */
  uint64_t seed;
  size_t runs;
  unsigned threads; /* 0: hardware concurrency */
} fg_sim_options;

FG_API fg_status fg_simulate(const fg_gts* g, const fg_graph* init, const fg_sim_options* opts,
                             fg_trajectories** out);
FG_API void fg_trajectories_free(fg_trajectories* t);
FG_API size_t fg_trajectories_count(const fg_trajectories* t);

/* run,time,rule,nodes */
FG_API fg_status fg_trajectories_events_csv(const fg_trajectories* t, char** out);
/* run,time and one column per value of node_type.attr */
FG_API fg_status fg_trajectories_observables_csv(const fg_trajectories* t, const char* node_type,
                                                 const char* attr, char** out);

/* Feature relevance: simulates both variants from equally seeded initial
 * states, projects onto the base variant and compares the final values of
 * the observable with a two-sample Kolmogorov-Smirnov test. */
typedef struct fg_compare_options {
  const char* features_a;
  const char* features_b;
  const char* base;
  const char* init;       /* as for fg_gts_generate_init */
  int grid;               /* 0: model default */
  const char* rates;      /* NULL or as for fg_gts_with_rates */
  const char* observable; /* "Agent.s=R" */
  double alpha;
  fg_sim_options sim; /* variant b uses seed + runs */
} fg_compare_options;

/* Sets *relevant, a multi-line report and a one-line key=value summary. */
FG_API fg_status fg_compare(const fg_model* m, const fg_compare_options* opts, int* relevant, char** report,
                            char** summary);

#ifdef __cplusplus
}
#endif

#endif
