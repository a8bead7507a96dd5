/* Generated by cbindgen from crates/ffi; do not edit. */

#ifndef WEBMAPS_H
#define WEBMAPS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WmStatus {
  WM_STATUS_OK = 0,
  WM_STATUS_NULL_POINTER = 1,
  WM_STATUS_INVALID_UTF8 = 2,
  WM_STATUS_INVALID_ARGUMENT = 3,
  WM_STATUS_PARSE = 4,
  WM_STATUS_IO = 5,
  WM_STATUS_REGION_MISMATCH = 6,
  WM_STATUS_UNKNOWN_NODE = 7,
  WM_STATUS_CYCLIC = 8,
  WM_STATUS_NOT_GOOD = 9,
  WM_STATUS_PANIC = 10,
} WmStatus;

typedef enum WmSemantics {
  WM_SEMANTICS_VISITED = 0,
  WM_SEMANTICS_SUCCESSFUL = 1,
} WmSemantics;

typedef struct WmGraph WmGraph;

typedef struct WmMap WmMap;

typedef struct WmRegion WmRegion;

// Predicate verdicts of [`wm_check`].
typedef struct WmVerdict {
  bool is_map;
  bool is_complete;
  bool is_route_complete;
  bool is_non_redundant;
  bool is_good;
} WmVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next call into this library on the same thread.
const char *wm_last_error(void);

// Loads a region from an edge file and an optional (NULL) attribute file.
//
// # Safety
// Paths must be NUL-terminated strings; `out` must be writable.
enum WmStatus wm_graph_load_files(const char *edges_path,
                                  const char *attrs_path,
                                  struct WmGraph **out);

// Loads a region from edge text and optional (NULL) attribute text.
//
// # Safety
// Texts must be NUL-terminated strings; `out` must be writable.
enum WmStatus wm_graph_load_str(const char *edges, const char *attrs, struct WmGraph **out);

// # Safety
// `g` must come from this library and not be freed twice. NULL is ignored.
void wm_graph_free(struct WmGraph *g);

// Number of nodes, or 0 for NULL.
//
// # Safety
// `g` must be NULL or a live graph handle.
size_t wm_graph_node_count(const struct WmGraph *g);

// Number of labeled edges, or 0 for NULL.
//
// # Safety
// `g` must be NULL or a live graph handle.
size_t wm_graph_edge_count(const struct WmGraph *g);

// Hex region id of the graph.
//
// # Safety
// `g` must be a live graph handle; `out` must be writable.
enum WmStatus wm_graph_fingerprint(const struct WmGraph *g, char **out);

// Good map of `g` over `len` node ids.
//
// # Safety
// `nodes` must point to `len` NUL-terminated strings; `out` must be writable.
enum WmStatus wm_good_map(const struct WmGraph *g,
                          const char *const *nodes,
                          size_t len,
                          struct WmMap **out);

// Good map over the nodes scoring at least `k` under `score`
// (`indegree`, `outdegree` or `pagerank`).
//
// # Safety
// `score` must be a NUL-terminated string; `out` must be writable.
enum WmStatus wm_k_map(const struct WmGraph *g, const char *score, double k, struct WmMap **out);

// Parses a map file. The result is not known to be good until
// [`wm_map_verify`] succeeds.
//
// # Safety
// `map_text` must be a NUL-terminated string; `out` must be writable.
enum WmStatus wm_map_parse(const char *map_text, struct WmMap **out);

// Checks the map against `g` and records the outcome on the map, so that
// [`wm_meet`] accepts it when good.
//
// # Safety
// Both handles must be live; `m` is modified in place.
enum WmStatus wm_map_verify(struct WmMap *m, const struct WmGraph *g);

// Map file text.
//
// # Safety
// `m` must be a live map handle; `out` must be writable.
enum WmStatus wm_map_to_string(const struct WmMap *m, char **out);

// # Safety
// `m` must be NULL or a live map handle.
size_t wm_map_node_count(const struct WmMap *m);

// # Safety
// `m` must be NULL or a live map handle.
size_t wm_map_edge_count(const struct WmMap *m);

// Whether the map has the edge `x -> y`; false on NULL or invalid input.
//
// # Safety
// Strings must be NUL-terminated; `m` must be NULL or a live map handle.
bool wm_map_has_edge(const struct WmMap *m, const char *x, const char *y);

// # Safety
// `m` must come from this library and not be freed twice. NULL is ignored.
void wm_map_free(struct WmMap *m);

// # Safety
// All handles must be live; `out` must be writable.
enum WmStatus wm_join(const struct WmMap *m1,
                      const struct WmMap *m2,
                      const struct WmGraph *g,
                      struct WmMap **out);

// Meet computed from the two maps alone. Both must be known good: built by
// this library or accepted by [`wm_map_verify`].
//
// # Safety
// Both handles must be live; `out` must be writable.
enum WmStatus wm_meet(const struct WmMap *m1, const struct WmMap *m2, struct WmMap **out);

// # Safety
// Both handles must be live; `out` must be writable.
enum WmStatus wm_complement(const struct WmMap *m, const struct WmGraph *g, struct WmMap **out);

// Writes whether `m1` lies below `m2` in the map order.
//
// # Safety
// Both handles must be live; `out` must be writable.
enum WmStatus wm_leq(const struct WmMap *m1, const struct WmMap *m2, bool *out);

// # Safety
// Both handles must be live; `out` must be writable.
enum WmStatus wm_check(const struct WmMap *m, const struct WmGraph *g, struct WmVerdict *out);

// Evaluates a navigational expression from `seed`.
//
// # Safety
// Strings must be NUL-terminated; `g` must be live; `out` must be writable.
enum WmStatus wm_evaluate(const struct WmGraph *g,
                          const char *seed,
                          const char *expr,
                          enum WmSemantics semantics,
                          struct WmRegion **out);

// Copies the extracted region into a new graph handle.
//
// # Safety
// `r` must be live; `out` must be writable.
enum WmStatus wm_region_graph(const struct WmRegion *r, struct WmGraph **out);

// # Safety
// `r` must be NULL or a live region handle.
size_t wm_region_selected_count(const struct WmRegion *r);

// The `i`-th selected node in id order, or NULL when out of range. The
// string is owned by the region handle.
//
// # Safety
// `r` must be NULL or a live region handle.
const char *wm_region_selected(const struct WmRegion *r, size_t i);

// # Safety
// `r` must come from this library and not be freed twice. NULL is ignored.
void wm_region_free(struct WmRegion *r);

// Releases a string returned through an out-parameter. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void wm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEBMAPS_H */
