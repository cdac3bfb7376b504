import { ApiClient } from "./api.js";
import { Store } from "./state.js";
import { App } from "./views.js";

declare global {
    interface Window {
        SCENGEN_API?: string;
    }
}

function apiBase(): string {
    const override = new URLSearchParams(location.search).get("api");
    if (override) return override;
    if (window.SCENGEN_API) return window.SCENGEN_API;
    // when served from the scengen service at /ui, the API is same-origin
    return location.origin;
}

const store = new Store(new ApiClient(apiBase()));
const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
new App(store, root);
void store.loadCatalog();

export { store };
