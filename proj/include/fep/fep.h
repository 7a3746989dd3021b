#ifndef FEP_H
#define FEP_H

#ifdef __cplusplus
extern "C" {
#endif

/* C interface to the facilitated-exclusion toolkit. All work goes through
 * JSON requests of the form {"op": "...", ...}; see docs/api.md for the
 * operation list and schemas. */

typedef struct fep_ctx fep_ctx;

fep_ctx* fep_ctx_new(void);
void fep_ctx_free(fep_ctx* ctx);

/* Executes one request. Returns 0 on success, 1 when a computation or
 * asserted property fails, 2 on a malformed request. On success *response
 * receives a JSON document owned by the caller; release it with
 * fep_string_free. On failure *response is set to NULL and
 * fep_ctx_last_error describes the problem. */
int fep_run_json(fep_ctx* ctx, const char* request, char** response);

/* Message of the last failed fep_run_json on this context; empty string if
 * the last call succeeded. Owned by the context. */
const char* fep_ctx_last_error(const fep_ctx* ctx);

void fep_string_free(char* s);

const char* fep_version(void);

#ifdef __cplusplus
}
#endif

#endif
