#ifndef ADVHOPF_H
#define ADVHOPF_H

#include <stddef.h>

#if defined(_WIN32)
#define ADVHOPF_API __declspec(dllexport)
#else
#define ADVHOPF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes of the command-line tool. */
typedef enum advhopf_status {
  ADVHOPF_OK = 0,
  ADVHOPF_CONFIG_ERROR = 2,
  ADVHOPF_NUMERICAL_ERROR = 3
} advhopf_status;

typedef struct advhopf_scenario advhopf_scenario;

ADVHOPF_API const char* advhopf_version(void);

/* Message of the most recent failure on the calling thread, "" if none. */
ADVHOPF_API const char* advhopf_last_error(void);

ADVHOPF_API advhopf_status advhopf_scenario_load(const char* path, advhopf_scenario** out);
ADVHOPF_API advhopf_status advhopf_scenario_parse(const char* text, advhopf_scenario** out);
ADVHOPF_API void advhopf_scenario_free(advhopf_scenario* s);

/* key is "section.key", e.g. "model.tau" or "normalform.series". */
ADVHOPF_API advhopf_status advhopf_scenario_set(advhopf_scenario* s, const char* key, const char* value);

/* Writes the lowercase hex SHA-256 (65 bytes with the terminator). */
ADVHOPF_API advhopf_status advhopf_scenario_hash(const advhopf_scenario* s, char* buf, size_t len);

/* Output directory from [output] dir, copied into buf. */
ADVHOPF_API advhopf_status advhopf_scenario_out_dir(const advhopf_scenario* s, char* buf, size_t len);

/* Runs eigen | steady | hopf | normalform | simulate. out_dir may be NULL to
   use the scenario's own directory. summary (may be NULL) receives a one-line
   description; warnings counts emitted warnings. */
ADVHOPF_API advhopf_status advhopf_run(const advhopf_scenario* s, const char* command, const char* out_dir,
                                       char* summary, size_t summary_len, int* warnings);

/* Direct numerical queries on the scenario's model block. */
ADVHOPF_API advhopf_status advhopf_steady_state(const advhopf_scenario* s, double* u, double* v);
ADVHOPF_API advhopf_status advhopf_critical_delay(const advhopf_scenario* s, int* n, double* omega, double* tau);
ADVHOPF_API advhopf_status advhopf_eigenvalues(const advhopf_scenario* s, int count, double* nu);
ADVHOPF_API advhopf_status advhopf_hopf_classification(const advhopf_scenario* s, double* gamma2, double* gamma3);

#ifdef __cplusplus
}
#endif

#endif
