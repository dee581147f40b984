/*
 * C interface to the supply-based-on-demand market engine.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions return an sbd_status; on failure a
 * description is available from sbd_last_error() on the same thread until
 * the next call into the library.
 */
#ifndef SBD_SBD_H
#define SBD_SBD_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(SBD_BUILDING_LIBRARY)
#define SBD_API __declspec(dllexport)
#else
#define SBD_API __declspec(dllimport)
#endif
#else
#define SBD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct sbd_scenario sbd_scenario;
typedef struct sbd_table sbd_table;

typedef enum sbd_status {
    SBD_OK = 0,
    SBD_ERR_INVALID_ARGUMENT = 1, /* null handle, bad enum value */
    SBD_ERR_VALIDATION = 2,       /* configuration or parameter out of range */
    SBD_ERR_NUMERICAL = 3,        /* unbounded orbit left the domain */
    SBD_ERR_NOT_FOUND = 4,        /* unknown builtin scenario */
    SBD_ERR_INTERNAL = 5
} sbd_status;

typedef enum sbd_format { SBD_FORMAT_CSV = 0, SBD_FORMAT_JSONL = 1 } sbd_format;

typedef enum sbd_method { SBD_METHOD_ANALYTIC = 0, SBD_METHOD_FINITE_DIFFERENCE = 1 } sbd_method;

SBD_API const char* sbd_version(void);
SBD_API const char* sbd_last_error(void);

/* Builtin registry */
SBD_API size_t sbd_builtin_count(void);
SBD_API const char* sbd_builtin_name(size_t index); /* NULL when out of range */

/* Scenarios */
SBD_API sbd_status sbd_scenario_builtin(const char* name, sbd_scenario** out);
SBD_API sbd_status sbd_scenario_parse(const char* document, sbd_scenario** out);
/* Same keys as the config document. "analysis" switches the analysis kind. */
SBD_API sbd_status sbd_scenario_set(sbd_scenario* scenario, const char* key, const char* value);
SBD_API sbd_status sbd_scenario_validate(const sbd_scenario* scenario);
/* Writes at most capacity bytes including the terminator; *length receives the
 * full text length. Pass buffer = NULL to query the length. */
SBD_API sbd_status sbd_scenario_serialize(const sbd_scenario* scenario, char* buffer, size_t capacity,
                                          size_t* length);
SBD_API void sbd_scenario_free(sbd_scenario* scenario);

/* Analyses. Each requires the scenario's analysis kind to match.
 * sbd_simulate returns SBD_ERR_NUMERICAL when an unbounded orbit fails; the
 * partial table is still stored in *out and must be freed. */
SBD_API sbd_status sbd_simulate(const sbd_scenario* scenario, sbd_table** out);
SBD_API sbd_status sbd_bifurcate(const sbd_scenario* scenario, unsigned threads, sbd_table** out);
SBD_API sbd_status sbd_lyapunov(const sbd_scenario* scenario, sbd_method method, unsigned threads,
                                sbd_table** out);
/* Runs the orbit in bounded mode and reports the first collapse. */
SBD_API sbd_status sbd_collapse(const sbd_scenario* scenario, sbd_table** out);
SBD_API sbd_status sbd_ped(const sbd_scenario* scenario, sbd_table** out);
SBD_API sbd_status sbd_scenarios_table(sbd_table** out);

/* Tables */
SBD_API size_t sbd_table_rows(const sbd_table* table);
SBD_API size_t sbd_table_columns(const sbd_table* table);
SBD_API const char* sbd_table_column_name(const sbd_table* table, size_t column);
/* NaN for blank or non-numeric cells; booleans read as 0/1. */
SBD_API double sbd_table_number(const sbd_table* table, size_t row, size_t column);
/* The text stays valid until the next render of the same table or its release. */
SBD_API sbd_status sbd_table_render(sbd_table* table, sbd_format format, const char** text,
                                    size_t* length);
SBD_API void sbd_table_free(sbd_table* table);

#ifdef __cplusplus
}
#endif

#endif /* SBD_SBD_H */
