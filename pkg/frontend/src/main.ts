import { ApiClient } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");
const user = new URLSearchParams(window.location.search).get("user") ?? "anonymous";
new App(new ApiClient(""), root, user);
