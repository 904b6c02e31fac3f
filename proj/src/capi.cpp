#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "bg/block_graph.hpp"
#include "bg/bp_tree.hpp"
#include "bg/corpus.hpp"
#include "bg/errors.hpp"
#include "bg/lz77.hpp"
#include "bg/serialize.hpp"
#include "blockgraph.h"

struct bg_graph {
    bg::BlockGraph graph;
};

namespace {

thread_local std::string t_last_error;

void set_error(const std::string& message) { t_last_error = message; }

/// Runs `fn`, translating exceptions into status codes and recording the
/// message for bg_last_error().
template <typename Fn>
bg_status wrap(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return BG_OK;
    } catch (const bg::OutOfRange& e) {
        set_error(e.what());
        return BG_ERR_OUT_OF_RANGE;
    } catch (const bg::UntrackedSymbol& e) {
        set_error(e.what());
        return BG_ERR_UNTRACKED_SYMBOL;
    } catch (const bg::BuildError& e) {
        set_error(e.what());
        return BG_ERR_BUILD_FAILED;
    } catch (const bg::VersionError& e) {
        set_error(e.what());
        return BG_ERR_BAD_VERSION;
    } catch (const bg::ChecksumError& e) {
        set_error(e.what());
        return BG_ERR_BAD_CHECKSUM;
    } catch (const bg::TruncatedError& e) {
        set_error(e.what());
        return BG_ERR_TRUNCATED;
    } catch (const bg::FormatError& e) {
        set_error(e.what());
        return BG_ERR_BAD_FORMAT;
    } catch (const bg::IoError& e) {
        set_error(e.what());
        return BG_ERR_IO;
    } catch (const bg::InvalidArgument& e) {
        set_error(e.what());
        return BG_ERR_INVALID_ARGUMENT;
    } catch (const std::bad_alloc&) {
        set_error("out of memory");
        return BG_ERR_NO_MEMORY;
    } catch (const std::exception& e) {
        set_error(e.what());
        return BG_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown failure");
        return BG_ERR_INTERNAL;
    }
}

bg_status require(bool ok, const char* message) {
    if (ok) return BG_OK;
    set_error(message);
    return BG_ERR_INVALID_ARGUMENT;
}

bg_status copy_out(const std::string& data, char** out, size_t* out_size) {
    char* buffer = static_cast<char*>(std::malloc(data.size() + 1));
    if (!buffer) {
        set_error("out of memory");
        return BG_ERR_NO_MEMORY;
    }
    std::memcpy(buffer, data.data(), data.size());
    buffer[data.size()] = '\0';
    *out = buffer;
    if (out_size) *out_size = data.size();
    t_last_error.clear();
    return BG_OK;
}

} // namespace

extern "C" {

void bg_build_config_init(bg_build_config* config) {
    if (!config) return;
    config->arity = 4;
    config->leaf_block_len = 0;
    config->affix_len = 0;
    config->rank_symbols = nullptr;
    config->enable_excess = 0;
    config->level_skip = 1;
    config->hash_seed = 0;
    config->hash_modulus_bits = 61;
    config->retry_cap = 16;
}

const char* bg_last_error(void) { return t_last_error.c_str(); }

bg_status bg_build(const char* text, size_t length, const bg_build_config* config,
                   bg_graph** out) {
    if (bg_status s = require(text && out, "text and out must not be NULL")) return s;
    return wrap([&] {
        bg::BuildConfig cfg;
        if (config) {
            cfg.arity = config->arity;
            cfg.leaf_block_len = config->leaf_block_len;
            cfg.affix_len = config->affix_len;
            if (config->rank_symbols) cfg.rank_symbols = std::string(config->rank_symbols);
            cfg.enable_excess = config->enable_excess != 0;
            cfg.level_skip = config->level_skip != 0;
            cfg.hash_seed = config->hash_seed;
            cfg.hash_modulus_bits = config->hash_modulus_bits;
            cfg.retry_cap = config->retry_cap;
        }
        auto handle = std::make_unique<bg_graph>();
        handle->graph = bg::build(std::string_view(text, length), cfg);
        *out = handle.release();
    });
}

void bg_free(bg_graph* graph) { delete graph; }

bg_status bg_save(const bg_graph* graph, const char* path) {
    if (bg_status s = require(graph && path, "graph and path must not be NULL")) return s;
    return wrap([&] { bg::save(graph->graph, path); });
}

bg_status bg_load(const char* path, bg_graph** out) {
    if (bg_status s = require(path && out, "path and out must not be NULL")) return s;
    return wrap([&] {
        auto handle = std::make_unique<bg_graph>();
        handle->graph = bg::load(path);
        *out = handle.release();
    });
}

bg_status bg_to_bytes(const bg_graph* graph, char** out_bytes, size_t* out_size) {
    if (bg_status s = require(graph && out_bytes && out_size,
                              "graph, out_bytes and out_size must not be NULL")) {
        return s;
    }
    bg_status status = BG_OK;
    bg_status wrapped = wrap([&] {
        const std::string bytes = bg::to_bytes(graph->graph);
        status = copy_out(bytes, out_bytes, out_size);
    });
    return wrapped != BG_OK ? wrapped : status;
}

bg_status bg_from_bytes(const char* bytes, size_t size, bg_graph** out) {
    if (bg_status s = require(bytes && out, "bytes and out must not be NULL")) return s;
    return wrap([&] {
        auto handle = std::make_unique<bg_graph>();
        handle->graph = bg::from_bytes(std::string_view(bytes, size));
        *out = handle.release();
    });
}

void bg_bytes_free(char* bytes) { std::free(bytes); }

bg_status bg_access(const bg_graph* graph, uint64_t i, char* out_symbol) {
    if (bg_status s = require(graph && out_symbol, "graph and out must not be NULL")) return s;
    return wrap([&] { *out_symbol = static_cast<char>(graph->graph.access(i)); });
}

bg_status bg_extract(const bg_graph* graph, uint64_t i, uint64_t m, char* out) {
    if (bg_status s = require(graph && (out || m == 0), "graph and out must not be NULL")) {
        return s;
    }
    return wrap([&] {
        const std::string piece = graph->graph.extract(i, m);
        std::memcpy(out, piece.data(), piece.size());
    });
}

bg_status bg_rank(const bg_graph* graph, char symbol, uint64_t i, uint64_t* out) {
    if (bg_status s = require(graph && out, "graph and out must not be NULL")) return s;
    return wrap([&] { *out = graph->graph.rank(static_cast<unsigned char>(symbol), i); });
}

bg_status bg_select(const bg_graph* graph, char symbol, uint64_t j, uint64_t* out) {
    if (bg_status s = require(graph && out, "graph and out must not be NULL")) return s;
    return wrap([&] { *out = graph->graph.select(static_cast<unsigned char>(symbol), j); });
}

bg_status bg_excess(const bg_graph* graph, uint64_t i, int64_t* out) {
    if (bg_status s = require(graph && out, "graph and out must not be NULL")) return s;
    return wrap([&] { *out = graph->graph.excess(i); });
}

bg_status bg_min_excess_pos(const bg_graph* graph, uint64_t i, uint64_t k, uint64_t* out) {
    if (bg_status s = require(graph && out, "graph and out must not be NULL")) return s;
    return wrap([&] { *out = graph->graph.min_excess_pos(i, k); });
}

bg_status bg_lca(const bg_graph* graph, uint64_t u, uint64_t v, uint64_t* out) {
    if (bg_status s = require(graph && out, "graph and out must not be NULL")) return s;
    return wrap([&] {
        bg::BpTree tree(graph->graph);
        *out = tree.lca(u, v);
    });
}

bg_status bg_verify(const bg_graph* graph, const char* text, size_t length, int* out_ok) {
    if (bg_status s = require(graph && (text || length == 0) && out_ok,
                              "graph, text and out must not be NULL")) {
        return s;
    }
    return wrap([&] {
        *out_ok = bg::verify(graph->graph, std::string_view(text, length)) ? 1 : 0;
    });
}

uint64_t bg_length(const bg_graph* graph) { return graph ? graph->graph.length() : 0; }

uint32_t bg_sigma(const bg_graph* graph) { return graph ? graph->graph.sigma() : 0; }

uint64_t bg_phrase_count(const bg_graph* graph) {
    return graph ? graph->graph.phrase_count() : 0;
}

uint32_t bg_level_count(const bg_graph* graph) {
    return graph ? static_cast<uint32_t>(graph->graph.levels().size()) : 0;
}

uint32_t bg_build_attempts(const bg_graph* graph) {
    return graph ? graph->graph.build_attempts() : 0;
}

int bg_excess_enabled(const bg_graph* graph) {
    return graph && graph->graph.excess_enabled() ? 1 : 0;
}

int bg_level_skip_used(const bg_graph* graph) {
    return graph && graph->graph.level_skip_used() ? 1 : 0;
}

bg_status bg_tracked_symbols(const bg_graph* graph, char* out, size_t cap, size_t* out_len) {
    if (bg_status s = require(graph && out, "graph and out must not be NULL")) return s;
    const std::string& tracked = graph->graph.tracked_symbols();
    if (cap < tracked.size() + 1) {
        set_error("buffer too small for the tracked symbol set");
        return BG_ERR_OUT_OF_RANGE;
    }
    std::memcpy(out, tracked.data(), tracked.size());
    out[tracked.size()] = '\0';
    if (out_len) *out_len = tracked.size();
    t_last_error.clear();
    return BG_OK;
}

bg_status bg_stats_text(const bg_graph* graph, char** out_text, size_t* out_size) {
    if (bg_status s = require(graph && out_text, "graph and out must not be NULL")) return s;
    bg_status status = BG_OK;
    bg_status wrapped = wrap([&] {
        const bg::SpaceStats st = bg::stats(graph->graph);
        std::ostringstream os;
        os << "n=" << st.text_length << '\n'
           << "sigma=" << st.sigma << '\n'
           << "phrase_count=" << st.phrase_count << '\n'
           << "levels=" << st.levels.size() << '\n'
           << "attempts=" << st.build_attempts << '\n'
           << "total_bytes=" << st.total_bytes << '\n'
           << "total_bits=" << st.total_bytes * 8 << '\n'
           << "plain_bits=" << st.plain_bits << '\n'
           << "header_bytes=" << st.header_bytes << '\n'
           << "structure_bytes=" << st.structure_bytes << '\n'
           << "literal_bytes=" << st.literal_bytes << '\n'
           << "pointer_bytes=" << st.pointer_bytes << '\n'
           << "rank_bytes=" << st.rank_bytes << '\n'
           << "affix_bytes=" << st.affix_bytes << '\n'
           << "excess_bytes=" << st.excess_bytes << '\n'
           << "trailer_bytes=" << st.trailer_bytes << '\n';
        for (std::size_t i = 0; i < st.levels.size(); ++i) {
            os << "level." << i << ".blocks=" << st.levels[i].blocks << '\n'
               << "level." << i << ".internal=" << st.levels[i].internal_blocks << '\n'
               << "level." << i << ".literal=" << st.levels[i].literal_blocks << '\n'
               << "level." << i << ".back=" << st.levels[i].back_blocks << '\n';
        }
        status = copy_out(os.str(), out_text, out_size);
    });
    return wrapped != BG_OK ? wrapped : status;
}

bg_status bg_lz77_phrase_count(const char* text, size_t length, uint64_t* out) {
    if (bg_status s = require(text && out, "text and out must not be NULL")) return s;
    return wrap([&] { *out = bg::lz77_phrase_count(std::string_view(text, length)); });
}

bg_status bg_gen_random(uint32_t sigma, uint64_t length, uint64_t seed, char** out,
                        size_t* out_size) {
    if (bg_status s = require(out != nullptr, "out must not be NULL")) return s;
    bg_status status = BG_OK;
    bg_status wrapped = wrap([&] {
        status = copy_out(bg::gen_random(sigma, length, seed), out, out_size);
    });
    return wrapped != BG_OK ? wrapped : status;
}

bg_status bg_gen_fibonacci(uint64_t min_length, char** out, size_t* out_size) {
    if (bg_status s = require(out != nullptr, "out must not be NULL")) return s;
    bg_status status = BG_OK;
    bg_status wrapped =
        wrap([&] { status = copy_out(bg::gen_fibonacci(min_length), out, out_size); });
    return wrapped != BG_OK ? wrapped : status;
}

bg_status bg_gen_power(const char* unit, size_t unit_len, uint64_t k, char** out,
                       size_t* out_size) {
    if (bg_status s = require(unit && out, "unit and out must not be NULL")) return s;
    bg_status status = BG_OK;
    bg_status wrapped = wrap([&] {
        status = copy_out(bg::gen_power(std::string(unit, unit_len), k), out, out_size);
    });
    return wrapped != BG_OK ? wrapped : status;
}

bg_status bg_gen_bp_tree(uint64_t nodes, uint64_t seed, char** out, size_t* out_size) {
    if (bg_status s = require(out != nullptr, "out must not be NULL")) return s;
    bg_status status = BG_OK;
    bg_status wrapped = wrap([&] {
        status = copy_out(bg::gen_bp_random_tree(nodes, seed), out, out_size);
    });
    return wrapped != BG_OK ? wrapped : status;
}

} // extern "C"
