import { ApiClient } from "./api.js";
import { WorkbenchStore } from "./store.js";
import { WorkbenchView } from "./view.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

// served under /ui by the backend; the API lives at the server root
const api = new ApiClient("");
const store = new WorkbenchStore(api);
new WorkbenchView(root, store);
void store.loadLabels().then(() => store.init(""));
