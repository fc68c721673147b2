#ifndef MULE_GATHER_H
#define MULE_GATHER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum MgStatus {
  MG_STATUS_OK = 0,
  MG_STATUS_NULL_POINTER = 1,
  MG_STATUS_INVALID_INPUT = 2,
  MG_STATUS_DISCONNECTED = 3,
  MG_STATUS_GENERATION_FAILED = 4,
  MG_STATUS_RANGE_OUT_OF_BOUNDS = 5,
  MG_STATUS_IO = 6,
  MG_STATUS_PARSE = 7,
  MG_STATUS_BUFFER_TOO_SMALL = 8,
  MG_STATUS_INTERNAL = 9,
  MG_STATUS_PANIC = 10,
} MgStatus;

// MULE placement for `mg_solve`.
typedef enum MgPolicy {
  MG_POLICY_FULL_SCAN = 0,
  MG_POLICY_CENTER_NODE = 1,
  // Uses the `fixed_node` argument.
  MG_POLICY_FIXED_NODE = 2,
} MgPolicy;

// Opaque unit disk graph.
typedef struct MgGraph MgGraph;

// Opaque pipeline result.
typedef struct MgSolution MgSolution;

// Scalar summary of a solution.
typedef struct MgSummary {
  size_t mule;
  size_t root;
  size_t cds_size;
  double weight_cds;
  double lower_bound;
  double alpha;
  bool alpha_valid;
  bool lb_valid;
} MgSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static nul-terminated string.
const char *mg_version(void);

// Copy of the last error message on this thread, or null if none. Free
// with `mg_string_free`.
char *mg_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void mg_string_free(char *s);

// Builds a graph from `n` coordinate pairs.
//
// # Safety
// `xs` and `ys` must point to `n` doubles; `out` must be writable.
enum MgStatus mg_graph_from_points(const double *xs,
                                   const double *ys,
                                   size_t n,
                                   struct MgGraph **out);

// Generates a connected random graph on a square of the given area.
//
// # Safety
// `out` must be writable.
enum MgStatus mg_graph_generate(double area,
                                double density,
                                uint64_t seed,
                                uint32_t max_rejections,
                                struct MgGraph **out);

// Reads a graph in the text format written by `mule-gather gen`.
//
// # Safety
// `path` must be a nul-terminated string; `out` must be writable.
enum MgStatus mg_graph_read_file(const char *path, struct MgGraph **out);

// Node count, or 0 for a null handle.
//
// # Safety
// `g` must be null or a live graph handle.
size_t mg_graph_node_count(const struct MgGraph *g);

// Coordinates of node `v`.
//
// # Safety
// `g` must be a live graph handle; `x` and `y` must be writable.
enum MgStatus mg_graph_point(const struct MgGraph *g, size_t v, double *x, double *y);

// # Safety
// `g` must be null or a handle not yet freed.
void mg_graph_free(struct MgGraph *g);

// The constant `C` added to every reduction weight.
//
// # Safety
// `out` must be writable.
enum MgStatus mg_weight_constant(double r_m, double *out);

// Builds the gathering tree. `fixed_node` is read only with
// `MG_POLICY_FIXED_NODE`.
//
// # Safety
// `g` must be a live graph handle; `out` must be writable.
enum MgStatus mg_solve(const struct MgGraph *g,
                       double r_m,
                       enum MgPolicy policy,
                       size_t fixed_node,
                       struct MgSolution **out);

// # Safety
// `s` must be null or a handle not yet freed.
void mg_solution_free(struct MgSolution *s);

// # Safety
// `s` must be a live solution handle; `out` must be writable.
enum MgStatus mg_solution_summary(const struct MgSolution *s, struct MgSummary *out);

// Writes the parent of every node into `parents` (length `cap`), with -1
// for the root. Returns `MG_STATUS_BUFFER_TOO_SMALL` if `cap` is below the
// node count.
//
// # Safety
// `s` must be a live solution handle; `parents` must hold `cap` values.
enum MgStatus mg_solution_parents(const struct MgSolution *s, int64_t *parents, size_t cap);

// Copies the connected dominating set (ascending) into `nodes` and its
// size into `len`. With a too-small buffer only `len` is written.
//
// # Safety
// `s` must be a live solution handle; `nodes` must hold `cap` values;
// `len` must be writable.
enum MgStatus mg_solution_cds(const struct MgSolution *s, size_t *nodes, size_t cap, size_t *len);

// Total tour cost of the solution's tree on `g`.
//
// # Safety
// Both handles must be live and `s` must come from `g`; `out` must be
// writable.
enum MgStatus mg_solution_cost(const struct MgGraph *g, const struct MgSolution *s, double *out);

// The full solution as JSON. Free with `mg_string_free`.
//
// # Safety
// `s` must be a live solution handle; `out` must be writable.
enum MgStatus mg_solution_to_json(const struct MgSolution *s, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MULE_GATHER_H */
