#include <qdforge/harness/snapshot.hpp>
#include <qdforge/common.hpp>

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace qdforge::harness {

namespace {
    constexpr char kMagic[4] = {'Q', 'D', 'A', 'R'};
    constexpr std::uint32_t kVersion = 1;

    void put_u64(std::ostream& out, std::uint64_t v)
    {
        char b[8];
        for (int i = 0; i < 8; i++)
            b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out.write(b, 8);
    }

    void put_f64(std::ostream& out, double v)
    {
        put_u64(out, std::bit_cast<std::uint64_t>(v));
    }

    void put_section(std::ostream& out, const std::vector<double>& values)
    {
        put_u64(out, values.size());
        for (double v : values)
            put_f64(out, v);
    }

    std::uint64_t get_u64(std::istream& in)
    {
        unsigned char b[8];
        in.read(reinterpret_cast<char*>(b), 8);
        if (!in)
            throw UsageError("archive snapshot: truncated file");
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; i--)
            v = (v << 8) | b[i];
        return v;
    }

    double get_f64(std::istream& in)
    {
        return std::bit_cast<double>(get_u64(in));
    }

    std::vector<double> get_section(std::istream& in)
    {
        std::uint64_t n = get_u64(in);
        std::vector<double> values(n);
        for (auto& v : values)
            v = get_f64(in);
        return values;
    }
} // namespace

void write_archive_snapshot(const std::filesystem::path& path, const std::vector<const qd::Individual*>& members)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot write archive snapshot '" + path.string() + "'");
    out.write(kMagic, 4);
    put_u64(out, kVersion);
    put_u64(out, members.size());
    for (const auto* m : members) {
        put_f64(out, m->fitness);
        put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(m->cell)));
        put_section(out, m->genome.params);
        put_section(out, m->raw_bd);
        put_section(out, m->latent_bd);
        put_section(out, m->ground_truth_bd);
    }
}

std::vector<qd::Individual> read_archive_snapshot(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot open archive snapshot '" + path.string() + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw UsageError("archive snapshot '" + path.string() + "' has a bad magic header");
    if (get_u64(in) != kVersion)
        throw UsageError("archive snapshot '" + path.string() + "' has an unsupported version");

    std::uint64_t count = get_u64(in);
    std::vector<qd::Individual> members(count);
    for (auto& m : members) {
        m.fitness = get_f64(in);
        m.cell = static_cast<int>(static_cast<std::int64_t>(get_u64(in)));
        m.genome.params = get_section(in);
        m.raw_bd = get_section(in);
        m.latent_bd = get_section(in);
        m.ground_truth_bd = get_section(in);
    }
    return members;
}

void write_model_checkpoint(const std::filesystem::path& path, const vqvae::VqVaeModel& model)
{
    const auto& o = model.options();
    nlohmann::json doc;
    doc["kind"] = "vqvae";
    doc["raw_dim"] = o.raw_dim;
    doc["latent_dim"] = o.latent_dim;
    doc["codebook_size"] = o.codebook_size;
    doc["hidden"] = o.hidden;
    doc["activation"] = autodiff::to_string(o.hidden_act);
    doc["bounded"] = o.bounded;
    doc["sigmoid_output"] = o.sigmoid_output;
    doc["beta"] = o.beta;
    doc["lr"] = o.lr;
    doc["input_scale"] = o.input_scale;
    doc["lr_decay"] = o.lr_decay;
    doc["params"] = model.flatten_parameters();

    std::ofstream out(path);
    if (!out)
        throw UsageError("cannot write model checkpoint '" + path.string() + "'");
    out << doc.dump() << "\n";
}

std::unique_ptr<vqvae::VqVaeModel> read_model_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open model checkpoint '" + path.string() + "'");
    nlohmann::json doc = nlohmann::json::parse(in);

    vqvae::VqVaeOptions opts;
    opts.raw_dim = doc.at("raw_dim").get<std::size_t>();
    opts.latent_dim = doc.at("latent_dim").get<std::size_t>();
    opts.codebook_size = doc.at("codebook_size").get<std::size_t>();
    opts.hidden = doc.at("hidden").get<std::vector<std::size_t>>();
    opts.hidden_act = autodiff::activation_from_string(doc.at("activation").get<std::string>());
    opts.bounded = doc.at("bounded").get<bool>();
    opts.sigmoid_output = doc.at("sigmoid_output").get<bool>();
    opts.beta = doc.at("beta").get<double>();
    opts.lr = doc.at("lr").get<double>();
    opts.input_scale = doc.at("input_scale").get<double>();
    opts.lr_decay = doc.at("lr_decay").get<double>();
    opts.codebook_init = vqvae::CodebookInit::normal; // overwritten below

    auto model = std::make_unique<vqvae::VqVaeModel>(opts);
    model->load_parameters(doc.at("params").get<std::vector<double>>());
    return model;
}

} // namespace qdforge::harness
