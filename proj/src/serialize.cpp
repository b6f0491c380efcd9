#include "patchdroso/serialize.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "patchdroso/errors.hpp"

namespace droso {

namespace {

constexpr char kUnitMagic[8] = {'P', 'D', 'N', 'U', 'N', 'I', 'T', '1'};
constexpr char kEnsembleMagic[8] = {'P', 'D', 'N', 'E', 'N', 'S', '1', '\0'};

void put_bytes(std::ostream& out, const void* p, size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get_bytes(std::istream& in, void* p, size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in)
        throw FormatError("truncated model file");
}

void put_u8(std::ostream& out, uint8_t v) { put_bytes(out, &v, 1); }
void put_i32(std::ostream& out, int32_t v) { put_bytes(out, &v, 4); }
void put_u32(std::ostream& out, uint32_t v) { put_bytes(out, &v, 4); }
void put_u64(std::ostream& out, uint64_t v) { put_bytes(out, &v, 8); }
void put_f64(std::ostream& out, double v) { put_bytes(out, &v, 8); }

uint8_t get_u8(std::istream& in) { uint8_t v; get_bytes(in, &v, 1); return v; }
int32_t get_i32(std::istream& in) { int32_t v; get_bytes(in, &v, 4); return v; }
uint32_t get_u32(std::istream& in) { uint32_t v; get_bytes(in, &v, 4); return v; }
uint64_t get_u64(std::istream& in) { uint64_t v; get_bytes(in, &v, 8); return v; }
double get_f64(std::istream& in) { double v; get_bytes(in, &v, 8); return v; }

void put_unit_config(std::ostream& out, const UnitConfig& cfg) {
    put_i32(out, cfg.hidden_units);
    put_f64(out, cfg.projection_density);
    put_f64(out, cfg.wta_keep_fraction);
    put_f64(out, cfg.learning_rate);
    put_i32(out, cfg.epochs);
    put_u64(out, cfg.seed);
}

UnitConfig get_unit_config(std::istream& in) {
    UnitConfig cfg;
    cfg.hidden_units = get_i32(in);
    cfg.projection_density = get_f64(in);
    cfg.wta_keep_fraction = get_f64(in);
    cfg.learning_rate = get_f64(in);
    cfg.epochs = get_i32(in);
    cfg.seed = get_u64(in);
    return cfg;
}

void put_unit_body(std::ostream& out, const DrosoNet& m) {
    put_unit_config(out, m.config);
    put_i32(out, m.n_places);
    for (const auto& row : m.projection) {
        put_u32(out, static_cast<uint32_t>(row.size()));
        put_bytes(out, row.data(), row.size() * sizeof(uint16_t));
    }
    put_bytes(out, m.out_weights.data(), m.out_weights.size() * sizeof(double));
    put_bytes(out, m.out_bias.data(), m.out_bias.size() * sizeof(double));
}

DrosoNet get_unit_body(std::istream& in) {
    DrosoNet m;
    m.config = get_unit_config(in);
    m.n_places = get_i32(in);
    if (m.n_places < 1 || m.config.hidden_units < 1)
        throw FormatError("corrupt model file: bad dimensions");
    m.projection.resize(static_cast<size_t>(m.config.hidden_units));
    for (auto& row : m.projection) {
        const uint32_t count = get_u32(in);
        if (count < 1 || count > kPatchPixels)
            throw FormatError("corrupt model file: bad projection row");
        row.resize(count);
        get_bytes(in, row.data(), count * sizeof(uint16_t));
        for (uint16_t i : row)
            if (i >= kPatchPixels)
                throw FormatError("corrupt model file: projection index out of range");
    }
    m.out_weights.resize(static_cast<size_t>(m.n_places) * m.config.hidden_units);
    get_bytes(in, m.out_weights.data(), m.out_weights.size() * sizeof(double));
    m.out_bias.resize(static_cast<size_t>(m.n_places));
    get_bytes(in, m.out_bias.data(), m.out_bias.size() * sizeof(double));
    return m;
}

}  // namespace

void save_unit(const DrosoNet& model, std::ostream& out) {
    put_bytes(out, kUnitMagic, sizeof(kUnitMagic));
    put_unit_body(out, model);
}

DrosoNet load_unit(std::istream& in) {
    char magic[8];
    get_bytes(in, magic, sizeof(magic));
    if (std::memcmp(magic, kUnitMagic, sizeof(magic)) != 0)
        throw FormatError("not a unit model file");
    return get_unit_body(in);
}

void save_unit(const DrosoNet& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write model file: " + path);
    save_unit(model, out);
    if (!out)
        throw IoError("failed writing model file: " + path);
}

DrosoNet load_unit(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read model file: " + path);
    return load_unit(in);
}

void save_ensemble(const PatchEnsemble& ensemble, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write ensemble file: " + path);
    put_bytes(out, kEnsembleMagic, sizeof(kEnsembleMagic));
    const EnsembleConfig& cfg = ensemble.config;
    put_i32(out, cfg.grid.rows);
    put_i32(out, cfg.grid.cols);
    put_i32(out, cfg.units_per_patch);
    put_u8(out, static_cast<uint8_t>(cfg.voting_mode));
    put_u64(out, cfg.master_seed);
    put_unit_config(out, cfg.unit_config);
    put_i32(out, ensemble.n_places);
    for (const auto& group : ensemble.groups)
        for (const DrosoNet& unit : group)
            put_unit_body(out, unit);
    if (!out)
        throw IoError("failed writing ensemble file: " + path);
}

PatchEnsemble load_ensemble(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read ensemble file: " + path);
    char magic[8];
    get_bytes(in, magic, sizeof(magic));
    if (std::memcmp(magic, kEnsembleMagic, sizeof(magic)) != 0)
        throw FormatError("not an ensemble file: " + path);

    PatchEnsemble ensemble;
    EnsembleConfig& cfg = ensemble.config;
    cfg.grid.rows = get_i32(in);
    cfg.grid.cols = get_i32(in);
    cfg.units_per_patch = get_i32(in);
    const uint8_t mode = get_u8(in);
    if (mode > 1)
        throw FormatError("corrupt ensemble file: bad voting mode");
    cfg.voting_mode = static_cast<VotingMode>(mode);
    cfg.master_seed = get_u64(in);
    cfg.unit_config = get_unit_config(in);
    ensemble.n_places = get_i32(in);

    validate_grid(cfg.grid);
    if (cfg.units_per_patch < 1 || ensemble.n_places < 1)
        throw FormatError("corrupt ensemble file: bad dimensions");

    ensemble.groups.resize(static_cast<size_t>(cfg.grid.cells()));
    for (auto& group : ensemble.groups) {
        group.reserve(static_cast<size_t>(cfg.units_per_patch));
        for (int u = 0; u < cfg.units_per_patch; ++u) {
            group.push_back(get_unit_body(in));
            if (group.back().n_places != ensemble.n_places)
                throw FormatError("corrupt ensemble file: unit place count mismatch");
        }
    }
    return ensemble;
}

}  // namespace droso
