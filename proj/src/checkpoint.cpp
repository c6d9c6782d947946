#include "ldnet/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace ldnet {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json vector_to_json(const Vector& v) {
    ordered_json arr = ordered_json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector json_to_vector(const ordered_json& arr) {
    Vector v(static_cast<Index>(arr.size()));
    for (Index i = 0; i < v.size(); ++i) v[i] = arr[static_cast<std::size_t>(i)].get<double>();
    return v;
}

ordered_json sizes_to_json(const std::vector<Index>& sizes) {
    ordered_json arr = ordered_json::array();
    for (Index s : sizes) arr.push_back(s);
    return arr;
}

std::vector<Index> json_to_sizes(const ordered_json& arr) {
    std::vector<Index> sizes;
    for (const auto& v : arr) sizes.push_back(v.get<Index>());
    return sizes;
}

}  // namespace

void save_checkpoint(const LDNet& model, const fs::path& stem, const CheckpointMeta& meta) {
    validate(model);
    ordered_json j;
    j["format"] = "ldnet-checkpoint-v1";
    j["n_latent"] = model.n_latent;
    j["dt"] = model.dt;
    j["dt_ref"] = model.dt_ref;
    j["rec_uses_input"] = model.rec_uses_input;
    j["dyn_layer_sizes"] = sizes_to_json(model.dyn.layer_sizes);
    j["rec_layer_sizes"] = sizes_to_json(model.rec.layer_sizes);
    j["u_center"] = vector_to_json(model.u_norm.center);
    j["u_half_width"] = vector_to_json(model.u_norm.half_width);
    j["x_center"] = vector_to_json(model.x_norm.center);
    j["x_half_width"] = vector_to_json(model.x_norm.half_width);
    j["y_center"] = vector_to_json(model.y_norm.center);
    j["y_half_width"] = vector_to_json(model.y_norm.half_width);
    j["equilibrium_input"] =
        model.equilibrium_input ? vector_to_json(*model.equilibrium_input) : ordered_json();
    j["loss_y_norm"] = meta.loss_y_norm;
    j["config_hash"] = meta.config_hash;
    j["parameter_count"] = {{"dyn", model.dyn.parameter_count()},
                            {"rec", model.rec.parameter_count()}};

    fs::path json_path = stem;
    json_path += ".json";
    std::ofstream out(json_path);
    if (!out) throw DataError("cannot write " + json_path.string());
    out << j.dump(2) << "\n";

    fs::path bin_path = stem;
    bin_path += ".bin";
    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin) throw DataError("cannot write " + bin_path.string());
    const Vector dyn_flat = flatten(model.dyn);
    const Vector rec_flat = flatten(model.rec);
    bin.write(reinterpret_cast<const char*>(dyn_flat.data()),
              static_cast<std::streamsize>(sizeof(double) * dyn_flat.size()));
    bin.write(reinterpret_cast<const char*>(rec_flat.data()),
              static_cast<std::streamsize>(sizeof(double) * rec_flat.size()));
}

LoadedCheckpoint load_checkpoint(const fs::path& stem) {
    fs::path json_path = stem;
    json_path += ".json";
    std::ifstream in(json_path);
    if (!in) throw DataError("cannot open " + json_path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("malformed checkpoint: " + std::string(e.what()));
    }
    if (j.value("format", "") != "ldnet-checkpoint-v1")
        throw DataError("unknown checkpoint format");

    LoadedCheckpoint loaded;
    LDNet& model = loaded.model;
    model.n_latent = j.at("n_latent").get<Index>();
    model.dt = j.at("dt").get<double>();
    model.dt_ref = j.at("dt_ref").get<double>();
    model.rec_uses_input = j.at("rec_uses_input").get<bool>();
    model.dyn = make_zero_network(json_to_sizes(j.at("dyn_layer_sizes")));
    model.rec = make_zero_network(json_to_sizes(j.at("rec_layer_sizes")));
    model.u_norm = {json_to_vector(j.at("u_center")), json_to_vector(j.at("u_half_width"))};
    model.x_norm = {json_to_vector(j.at("x_center")), json_to_vector(j.at("x_half_width"))};
    model.y_norm = {json_to_vector(j.at("y_center")), json_to_vector(j.at("y_half_width"))};
    if (!j.at("equilibrium_input").is_null())
        model.equilibrium_input = json_to_vector(j.at("equilibrium_input"));
    loaded.meta.loss_y_norm = j.value("loss_y_norm", 0.0);
    loaded.meta.config_hash = j.value("config_hash", "");

    fs::path bin_path = stem;
    bin_path += ".bin";
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw DataError("cannot open " + bin_path.string());
    const Index n_dyn = model.dyn.parameter_count();
    const Index n_rec = model.rec.parameter_count();
    Vector flat(n_dyn + n_rec);
    bin.read(reinterpret_cast<char*>(flat.data()),
             static_cast<std::streamsize>(sizeof(double) * flat.size()));
    if (bin.gcount() != static_cast<std::streamsize>(sizeof(double) * flat.size()))
        throw DataError("checkpoint binary is shorter than the declared architecture");
    set_parameters(model.dyn, flat.head(n_dyn));
    set_parameters(model.rec, flat.tail(n_rec));
    validate(model);
    return loaded;
}

}  // namespace ldnet
