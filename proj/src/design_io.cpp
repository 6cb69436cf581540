#include "voxfract/design_io.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace voxfract
{

namespace
{

std::string_view material_code(Material m)
{
    switch (m)
    {
    case Material::PhaseA:
        return "A";
    case Material::PhaseB:
        return "B";
    case Material::None:
        break;
    }
    return "-";
}

Material parse_material_code(const std::string& s)
{
    if (s == "A")
        return Material::PhaseA;
    if (s == "B")
        return Material::PhaseB;
    if (s == "-")
        return Material::None;
    throw std::runtime_error("unknown material code '" + s + "'");
}

} // namespace

std::string design_to_text(const DesignSnapshot& snapshot)
{
    const Polycube& p = snapshot.design;
    std::string out;
    out += "{\n  \"format\": \"voxfract-design\",\n  \"version\": 1,\n";
    out += fmt::format("  \"extent\": {},\n  \"voxel_size\": {},\n  \"actuation_mode\": \"{}\",\n", p.extent(),
                       p.voxel_size(), to_string(snapshot.mode));
    out += "  \"voxels\": [\n";
    const auto voxels = p.voxels();
    for (std::size_t i = 0; i < voxels.size(); ++i)
    {
        const auto& v = voxels[i];
        out += fmt::format("    [{}, {}, {}, \"{}\"]{}\n", v.at.x, v.at.y, v.at.z, material_code(v.material),
                           i + 1 < voxels.size() ? "," : "");
    }
    out += "  ]\n}\n";
    return out;
}

DesignSnapshot design_from_text(const std::string& text)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw std::runtime_error(std::string("design file is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != "voxfract-design")
        throw std::runtime_error("not a voxfract design file");
    if (j.value("version", 0) != 1)
        throw std::runtime_error("unsupported design file version");

    const auto mode = parse_actuation_mode(j.at("actuation_mode").get<std::string>());
    if (!mode)
        throw std::runtime_error("unknown actuation_mode");

    std::vector<Voxel> voxels;
    for (const auto& row : j.at("voxels"))
    {
        if (!row.is_array() || row.size() != 4)
            throw std::runtime_error("each voxel must be [x, y, z, material]");
        voxels.push_back({{row[0].get<int>(), row[1].get<int>(), row[2].get<int>()},
                          parse_material_code(row[3].get<std::string>())});
    }
    try
    {
        return {Polycube(j.at("extent").get<int>(), std::move(voxels), j.at("voxel_size").get<double>()), *mode};
    }
    catch (const std::invalid_argument& e)
    {
        throw std::runtime_error(std::string("invalid design: ") + e.what());
    }
}

void save_design(const std::filesystem::path& path, const DesignSnapshot& snapshot)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << design_to_text(snapshot);
}

DesignSnapshot load_design(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return design_from_text(ss.str());
}

} // namespace voxfract
