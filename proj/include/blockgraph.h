#ifndef BLOCKGRAPH_H
#define BLOCKGRAPH_H

/* C interface to the block graph library: an LZ-bounded compressed string
 * representation with random access, substring extraction, rank/select over
 * tracked symbols, parenthesis excess queries and lowest common ancestors on
 * balanced-parenthesis trees.
 *
 * Every fallible call returns a bg_status; on failure bg_last_error() holds
 * a human-readable message for the calling thread. Handles returned through
 * bg_graph** are owned by the caller and released with bg_free(). Buffers
 * returned through char** are released with bg_bytes_free(). Positions are
 * 1-based, matching the query semantics of the underlying library.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bg_status {
    BG_OK = 0,
    BG_ERR_INVALID_ARGUMENT = 1,
    BG_ERR_OUT_OF_RANGE = 2,
    BG_ERR_UNTRACKED_SYMBOL = 3,
    BG_ERR_BUILD_FAILED = 4, /* fingerprint collisions exhausted the retry cap */
    BG_ERR_BAD_FORMAT = 5,
    BG_ERR_BAD_VERSION = 6,
    BG_ERR_BAD_CHECKSUM = 7,
    BG_ERR_TRUNCATED = 8,
    BG_ERR_IO = 9,
    BG_ERR_NO_MEMORY = 10,
    BG_ERR_INTERNAL = 11
} bg_status;

typedef struct bg_graph bg_graph;

typedef struct bg_build_config {
    uint32_t arity;            /* fan-out of internal blocks, >= 2 */
    uint64_t leaf_block_len;   /* 0 = max(1, floor(log2 n / log2 sigma)) */
    uint64_t affix_len;        /* 0 = derived from leaf_block_len */
    const char* rank_symbols;  /* NUL-terminated set; NULL = default rule */
    int enable_excess;         /* parenthesis excess metadata */
    int level_skip;            /* start from r*z top blocks instead of r */
    uint64_t hash_seed;
    uint32_t hash_modulus_bits; /* fingerprint modulus width, 8..62 */
    uint32_t retry_cap;         /* construction attempts before giving up */
} bg_build_config;

/* Fills the defaults: arity 4, derived lengths, default tracking, no excess,
 * level skip on, seed 0, 61-bit modulus, retry cap 16. */
void bg_build_config_init(bg_build_config* config);

/* Message describing this thread's most recent failure; empty string if none. */
const char* bg_last_error(void);

/* --- lifecycle ---------------------------------------------------------- */

bg_status bg_build(const char* text, size_t length, const bg_build_config* config,
                   bg_graph** out);
void bg_free(bg_graph* graph);

bg_status bg_save(const bg_graph* graph, const char* path);
bg_status bg_load(const char* path, bg_graph** out);
bg_status bg_to_bytes(const bg_graph* graph, char** out_bytes, size_t* out_size);
bg_status bg_from_bytes(const char* bytes, size_t size, bg_graph** out);
void bg_bytes_free(char* bytes);

/* --- queries ------------------------------------------------------------ */

bg_status bg_access(const bg_graph* graph, uint64_t i, char* out_symbol);
/* Writes exactly m bytes (no terminator) into out, which must hold them. */
bg_status bg_extract(const bg_graph* graph, uint64_t i, uint64_t m, char* out);
bg_status bg_rank(const bg_graph* graph, char symbol, uint64_t i, uint64_t* out);
bg_status bg_select(const bg_graph* graph, char symbol, uint64_t j, uint64_t* out);
bg_status bg_excess(const bg_graph* graph, uint64_t i, int64_t* out);
/* Leftmost position of the minimum prefix excess in [i, k]. */
bg_status bg_min_excess_pos(const bg_graph* graph, uint64_t i, uint64_t k, uint64_t* out);
/* Opening position of the lowest common ancestor of the nodes opened at
 * positions u and v of a balanced-parenthesis text. */
bg_status bg_lca(const bg_graph* graph, uint64_t u, uint64_t v, uint64_t* out);
/* Sets *out_ok to 1 when the graph reproduces the text exactly, else 0. */
bg_status bg_verify(const bg_graph* graph, const char* text, size_t length, int* out_ok);

/* --- metadata ----------------------------------------------------------- */

uint64_t bg_length(const bg_graph* graph);
uint32_t bg_sigma(const bg_graph* graph);
uint64_t bg_phrase_count(const bg_graph* graph);
uint32_t bg_level_count(const bg_graph* graph);
uint32_t bg_build_attempts(const bg_graph* graph);
int bg_excess_enabled(const bg_graph* graph);
int bg_level_skip_used(const bg_graph* graph);
/* Copies the tracked symbol set (NUL-terminated) into out; fails with
 * BG_ERR_OUT_OF_RANGE when cap is too small. out_len may be NULL. */
bg_status bg_tracked_symbols(const bg_graph* graph, char* out, size_t cap, size_t* out_len);

/* Space accounting of the serialized graph as key=value lines. */
bg_status bg_stats_text(const bg_graph* graph, char** out_text, size_t* out_size);

/* --- corpus helpers ------------------------------------------------------ */

bg_status bg_lz77_phrase_count(const char* text, size_t length, uint64_t* out);
bg_status bg_gen_random(uint32_t sigma, uint64_t length, uint64_t seed, char** out,
                        size_t* out_size);
/* Shortest Fibonacci-word prefix chain member of length >= min_length,
 * truncated to exactly min_length symbols. */
bg_status bg_gen_fibonacci(uint64_t min_length, char** out, size_t* out_size);
bg_status bg_gen_power(const char* unit, size_t unit_len, uint64_t k, char** out,
                       size_t* out_size);
/* Balanced-parenthesis encoding of a random tree with the given node count. */
bg_status bg_gen_bp_tree(uint64_t nodes, uint64_t seed, char** out, size_t* out_size);

#ifdef __cplusplus
}
#endif

#endif /* BLOCKGRAPH_H */
