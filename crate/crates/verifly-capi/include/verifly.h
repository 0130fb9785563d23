#ifndef VERIFLY_H
#define VERIFLY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define VFLY_OK 0

/**
 * A required pointer argument was null.
 */
#define VFLY_ERR_NULL 1

/**
 * A string argument was not valid UTF-8.
 */
#define VFLY_ERR_UTF8 2

/**
 * The domain name was not one of modes, types, product, auto.
 */
#define VFLY_ERR_DOMAIN 3

/**
 * The context has no sources to analyze.
 */
#define VFLY_ERR_EMPTY 4

/**
 * Opaque analysis context. Owns the registered sources and the cached
 * fixpoint used for incremental re-analysis.
 */
typedef struct VflyContext VflyContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an empty context. Free with `vfly_context_free`.
 */
struct VflyContext *vfly_context_new(void);

/**
 * Frees a context. A null pointer is ignored.
 */
void vfly_context_free(struct VflyContext *ctx);

/**
 * Selects the abstract domain: "modes", "types", "product", or "auto"
 * (the default; picks based on the properties the program asserts).
 */
int vfly_set_domain(struct VflyContext *ctx, const char *name);

/**
 * Registers or replaces the source text filed under `name`. Passing a null
 * `text` removes the entry.
 */
int vfly_set_source(struct VflyContext *ctx, const char *name, const char *text);

/**
 * Analyzes the registered sources and writes a JSON object
 * `{"diagnostics": [...], "stats": {...}}` to `*out_json` as a heap
 * string. The caller owns the string and must release it with
 * `vfly_string_free`. Reuses the previous fixpoint when only part of the
 * program changed since the last call.
 */
int vfly_check(struct VflyContext *ctx, char **out_json);

/**
 * Releases a string returned by this library. A null pointer is ignored.
 */
void vfly_string_free(char *s);

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *vfly_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VERIFLY_H */
