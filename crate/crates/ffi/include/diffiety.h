#ifndef DIFFIETY_H
#define DIFFIETY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DiffietyStatus {
  DIFFIETY_STATUS_OK = 0,
  DIFFIETY_STATUS_NULL_ARGUMENT = 1,
  DIFFIETY_STATUS_INVALID_UTF8 = 2,
  DIFFIETY_STATUS_PARSE = 3,
  DIFFIETY_STATUS_COMPUTE = 4,
  DIFFIETY_STATUS_NOT_FOUND = 5,
  DIFFIETY_STATUS_PANIC = 6,
} DiffietyStatus;

typedef enum DiffietyFormat {
  DIFFIETY_FORMAT_TEXT = 0,
  DIFFIETY_FORMAT_LATEX = 1,
  DIFFIETY_FORMAT_JSON = 2,
} DiffietyFormat;

typedef enum DiffietyClassification {
  DIFFIETY_CLASSIFICATION_CONTROLLABLE = 0,
  DIFFIETY_CLASSIFICATION_DEGENERATE_FIRST_ORDER = 1,
  DIFFIETY_CLASSIFICATION_DEGENERATE_SECOND_ORDER = 2,
} DiffietyClassification;

/*
 An exact expression.
 */
typedef struct DiffietyExpr DiffietyExpr;

/*
 One level of the KdV hierarchy.
 */
typedef struct DiffietyHierarchy DiffietyHierarchy;

/*
 Standard basis of `u'' = F(x, u, v, u', v', v'')`.
 */
typedef struct DiffietyStandardBasis DiffietyStandardBasis;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failure on this thread, or null. The pointer stays
 valid until the next failing call on the same thread.
 */
const char *diffiety_last_error(void);

/*
 # Safety
 `s` must come from this library and not have been freed.
 */
void diffiety_string_free(char *s);

/*
 Parse `text` with the coordinate vocabulary of `model` (`"ode2"`,
 `"pde1"`, `"pencil"`, `"kdv"` or `"jets m n"`).

 # Safety
 String arguments must be NUL-terminated; `out` must be writable.
 */
enum DiffietyStatus diffiety_expr_parse(const char *model,
                                        const char *text,
                                        struct DiffietyExpr **out);

/*
 # Safety
 `expr` must be a live handle and `out` writable.
 */
enum DiffietyStatus diffiety_expr_render(const struct DiffietyExpr *expr,
                                         enum DiffietyFormat format,
                                         char **out);

/*
 Whether two expressions are identical in canonical form.

 # Safety
 Handles must be live and `out` writable.
 */
enum DiffietyStatus diffiety_expr_equal(const struct DiffietyExpr *a,
                                        const struct DiffietyExpr *b,
                                        bool *out);

/*
 # Safety
 `expr` must come from this library and not have been freed.
 */
void diffiety_expr_free(struct DiffietyExpr *expr);

/*
 Standard basis for the right-hand side `f` (parsed with model `"ode2"`).

 # Safety
 `f` must be a live handle and `out` writable.
 */
enum DiffietyStatus diffiety_standard_basis(const struct DiffietyExpr *f,
                                            struct DiffietyStandardBasis **out);

/*
 Coefficient `A`, `B`, `C`, `M`, `N` or `Delta` of a standard basis.

 # Safety
 `sb` must be a live handle, `name` NUL-terminated, `out` writable.
 */
enum DiffietyStatus diffiety_standard_basis_coefficient(const struct DiffietyStandardBasis *sb,
                                                        const char *name,
                                                        struct DiffietyExpr **out);

/*
 # Safety
 `sb` must be a live handle and `out` writable.
 */
enum DiffietyStatus diffiety_standard_basis_classification(const struct DiffietyStandardBasis *sb,
                                                           enum DiffietyClassification *out);

/*
 # Safety
 `sb` must come from this library and not have been freed.
 */
void diffiety_standard_basis_free(struct DiffietyStandardBasis *sb);

/*
 KdV hierarchy up to `level`.

 # Safety
 `out` must be writable.
 */
enum DiffietyStatus diffiety_kdv_hierarchy(uint32_t level, struct DiffietyHierarchy **out);

/*
 Coefficient `B_k`, `0 ≤ k ≤ level`.

 # Safety
 `h` must be a live handle and `out` writable.
 */
enum DiffietyStatus diffiety_hierarchy_coefficient(const struct DiffietyHierarchy *h,
                                                   uint32_t k,
                                                   struct DiffietyExpr **out);

/*
 Evolution right-hand side `Q` of the level.

 # Safety
 `h` must be a live handle and `out` writable.
 */
enum DiffietyStatus diffiety_hierarchy_flow(const struct DiffietyHierarchy *h,
                                            struct DiffietyExpr **out);

/*
 # Safety
 `h` must come from this library and not have been freed.
 */
void diffiety_hierarchy_free(struct DiffietyHierarchy *h);

/*
 Run a command-line invocation (`argv[0]` is the program name). Standard
 output is returned in `out`, diagnostics in `err`, the exit status in
 `code`.

 # Safety
 `argv` must hold `argc` NUL-terminated strings; out-pointers writable.
 */
enum DiffietyStatus diffiety_run(size_t argc,
                                 const char *const *argv,
                                 char **out,
                                 char **err,
                                 int32_t *code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIFFIETY_H */
